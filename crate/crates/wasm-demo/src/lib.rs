//! JSON report functions behind the browser demo page.
//!
//! The logic is plain Rust so it builds and tests on any target; the
//! `wasm-bindgen` exports are compiled only for wasm32.

use serde::Serialize;

use triallink::linkpipe::{compute_stats, run_linkspec, LinkSpec, MethodSpec, StatsRow};
use triallink::model::{EntityRecord, EntitySet, LinkType};
use triallink::qgram::{tokenize, weighted_jaccard, WeightTable};
use triallink::semjoin::Thesaurus;

#[derive(Serialize)]
struct TokenReport {
    q: usize,
    tokens: Vec<String>,
}

#[derive(Serialize)]
struct WeightRow {
    token: String,
    count: usize,
    weight: f64,
    shared: bool,
}

#[derive(Serialize)]
struct SimilarityReport {
    score: f64,
    plain_jaccard: f64,
    tokens_a: Vec<String>,
    tokens_b: Vec<String>,
    shared: Vec<String>,
    /// Union tokens with their base statistics, sorted by weight descending.
    weights: Vec<WeightRow>,
    base_size: usize,
}

#[derive(Serialize)]
struct LinkRow {
    source: String,
    target: String,
    score: f64,
    methods: Vec<String>,
}

#[derive(Serialize)]
struct StatsRowJson {
    method: String,
    link_count: u64,
    link_diff_pct: Option<f64>,
    linked_entity_count: u64,
    entity_diff_pct: Option<f64>,
}

#[derive(Serialize)]
struct LinkReport {
    links: Vec<LinkRow>,
    stats: Vec<StatsRowJson>,
    source_count: usize,
    target_count: usize,
}

/// q-gram tokens of `text`, as JSON.
pub fn token_report(text: &str, q: usize) -> Result<String, String> {
    let tokens = tokenize(text, q).map_err(|e| e.to_string())?;
    let report = TokenReport {
        q,
        tokens: tokens.iter().map(String::from).collect(),
    };
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Weighted Jaccard similarity of `a` and `b` under RSJ weights built from
/// `base_corpus` (one value per line), as JSON.
pub fn similarity_report(a: &str, b: &str, base_corpus: &str, q: usize) -> Result<String, String> {
    let values: Vec<&str> = base_corpus
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if values.is_empty() {
        return Err("the base corpus needs at least one value".to_string());
    }
    let w = WeightTable::build(&values, q).map_err(|e| e.to_string())?;
    let ta = tokenize(a, q).map_err(|e| e.to_string())?;
    let tb = tokenize(b, q).map_err(|e| e.to_string())?;
    let score = weighted_jaccard(&ta, &tb, &w).map_err(|e| e.to_string())?;
    let uniform = WeightTable::uniform(q).map_err(|e| e.to_string())?;
    let plain = weighted_jaccard(&ta, &tb, &uniform).map_err(|e| e.to_string())?;

    let shared: Vec<String> = ta
        .iter()
        .filter(|t| tb.contains(t))
        .map(String::from)
        .collect();
    let mut weights: Vec<WeightRow> = ta
        .iter()
        .chain(tb.iter().filter(|t| !ta.contains(t)))
        .map(|t| WeightRow {
            token: t.to_string(),
            count: w.token_count(t),
            weight: w.weight(t),
            shared: ta.contains(t) && tb.contains(t),
        })
        .collect();
    weights.sort_by(|x, y| y.weight.total_cmp(&x.weight).then_with(|| x.token.cmp(&y.token)));

    let report = SimilarityReport {
        score,
        plain_jaccard: plain,
        tokens_a: ta.iter().map(String::from).collect(),
        tokens_b: tb.iter().map(String::from).collect(),
        shared,
        weights,
        base_size: w.base_size(),
    };
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// One entity per line: `name` or `name, occurrences`.
fn parse_entity_lines(text: &str, prefix: &str, entity_type: &str) -> Result<EntitySet, String> {
    let mut records = Vec::new();
    for (i, line) in text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
    {
        let (name, occurrences) = match line.rsplit_once(',') {
            Some((head, tail)) => match tail.trim().parse::<u64>() {
                Ok(n) => (head.trim(), n),
                Err(_) => (line, 1),
            },
            None => (line, 1),
        };
        records.push(EntityRecord::new(
            format!("{prefix}{}", i + 1),
            name,
            occurrences,
        ));
    }
    if records.is_empty() {
        return Err("entity list is empty".to_string());
    }
    EntitySet::new(entity_type, entity_type, records).map_err(|e| e.to_string())
}

/// Run exact + string (+ semantic, when a thesaurus is given) matching
/// between two entity lists and report links and fan-out stats as JSON.
pub fn link_report(
    source_lines: &str,
    target_lines: &str,
    theta: f64,
    q: usize,
    thesaurus_tsv: &str,
) -> Result<String, String> {
    let source = parse_entity_lines(source_lines, "s", "source")?;
    let target = parse_entity_lines(target_lines, "t", "target")?;

    let mut methods = vec![MethodSpec::Exact, MethodSpec::StringSim { theta, q }];
    let thesaurus = if thesaurus_tsv.trim().is_empty() {
        None
    } else {
        methods.push(MethodSpec::Semantic {
            rel: "synonym".to_string(),
            depth: 0,
        });
        Some(Thesaurus::parse(thesaurus_tsv).map_err(|e| e.to_string())?)
    };

    let spec = LinkSpec::new(
        "demo",
        source,
        target,
        methods,
        LinkType::parse("owl:sameAs").map_err(|e| e.to_string())?,
        "http://example.org/resource",
        "http://example.org/external",
    )
    .map_err(|e| e.to_string())?;

    let link_set = run_linkspec(&spec, thesaurus.as_ref()).map_err(|e| e.to_string())?;
    let stats = compute_stats(&link_set, &spec.source_occurrences()).map_err(|e| e.to_string())?;

    let field_of = |set: &EntitySet, id: &str| {
        set.record(id)
            .map(|r| r.match_field.clone())
            .unwrap_or_else(|| id.to_string())
    };
    let links = link_set
        .overall
        .iter()
        .map(|l| LinkRow {
            source: field_of(&spec.source, &l.source_id),
            target: field_of(&spec.target, &l.target_id),
            score: l.score,
            methods: l.methods.iter().map(|m| m.label().to_string()).collect(),
        })
        .collect();

    let report = LinkReport {
        links,
        stats: stats_rows(&stats),
        source_count: spec.source.len(),
        target_count: spec.target.len(),
    };
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

fn stats_rows(stats: &StatsRow) -> Vec<StatsRowJson> {
    stats
        .rows
        .iter()
        .map(|r| StatsRowJson {
            method: r.label.name().to_string(),
            link_count: r.link_count,
            link_diff_pct: r.link_diff_pct,
            linked_entity_count: r.linked_entity_count,
            entity_diff_pct: r.entity_diff_pct,
        })
        .collect()
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen]
    pub fn tokens_json(text: &str, q: usize) -> Result<String, JsValue> {
        super::token_report(text, q).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn similarity_json(
        a: &str,
        b: &str,
        base_corpus: &str,
        q: usize,
    ) -> Result<String, JsValue> {
        super::similarity_report(a, b, base_corpus, q).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn links_json(
        source_lines: &str,
        target_lines: &str,
        theta: f64,
        q: usize,
        thesaurus_tsv: &str,
    ) -> Result<String, JsValue> {
        super::link_report(source_lines, target_lines, theta, q, thesaurus_tsv)
            .map_err(|e| JsValue::from_str(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_report_shape() {
        let json = token_report("HIV", 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["q"], 2);
        assert_eq!(v["tokens"].as_array().unwrap().len(), 4); // $h hi iv v$
        assert!(token_report("x", 1).is_err());
    }

    #[test]
    fn similarity_report_scores_match_core() {
        let json = similarity_report(
            "thalassemia",
            "thalassaemia",
            "thalassemia\nanemia\nasthma\nlung cancer\ndiabetes mellitus\n",
            2,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let score = v["score"].as_f64().unwrap();
        assert!((score - 0.5370895057624555).abs() < 1e-9);
        assert!(v["plain_jaccard"].as_f64().unwrap() > 0.0);
        assert!(!v["shared"].as_array().unwrap().is_empty());
        assert_eq!(v["base_size"], 5);
    }

    #[test]
    fn link_report_unions_methods() {
        let json = link_report(
            "Asthma, 3\nThalassemia, 2\nTylenol, 5\n",
            "asthma\nThalassaemia\nParacetamol\n",
            0.4,
            2,
            "C:a\tTylenol\nC:a\tParacetamol\n",
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["links"].as_array().unwrap().len(), 3);
        let overall = v["stats"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["method"] == "overall")
            .unwrap()
            .clone();
        assert_eq!(overall["link_count"], 10);
        assert_eq!(overall["linked_entity_count"], 3);
    }

    #[test]
    fn empty_entity_list_is_an_error() {
        assert!(link_report("", "x", 0.5, 2, "").is_err());
    }
}
