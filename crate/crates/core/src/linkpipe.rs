//! Declarative link discovery: run exact / string / semantic matchers over a
//! source and target entity set, union the results with per-method
//! provenance, compute fan-out statistics and emit typed RDF links.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{
    mint_uri, normalize, EntityRecord, EntitySet, Link, LinkType, MatchKind, Triple,
};
use crate::qgram::WeightTable;
use crate::semjoin::{semantic_join_with_depth, Thesaurus, SYNONYM};
use crate::simjoin::indexed_join;

/// One matching method with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Exact,
    StringSim { theta: f64, q: usize },
    Semantic { rel: String, depth: usize },
}

impl MethodSpec {
    pub fn kind(&self) -> MatchKind {
        match self {
            MethodSpec::Exact => MatchKind::Exact,
            MethodSpec::StringSim { .. } => MatchKind::String,
            MethodSpec::Semantic { .. } => MatchKind::Semantic,
        }
    }
}

/// One linkage scenario: where to match, how, and what predicate to emit.
#[derive(Debug, Clone)]
pub struct LinkSpec {
    pub name: String,
    pub source: EntitySet,
    pub target: EntitySet,
    pub methods: Vec<MethodSpec>,
    pub link_type: LinkType,
    pub base_uri_source: String,
    pub base_uri_target: String,
}

impl LinkSpec {
    pub fn new(
        name: impl Into<String>,
        source: EntitySet,
        target: EntitySet,
        methods: Vec<MethodSpec>,
        link_type: LinkType,
        base_uri_source: impl Into<String>,
        base_uri_target: impl Into<String>,
    ) -> Result<Self> {
        if methods.is_empty() {
            return Err(Error::invalid_argument("a link spec needs at least one method"));
        }
        let mut kinds = BTreeSet::new();
        for m in &methods {
            if let MethodSpec::StringSim { theta, q } = m {
                if !(0.0..1.0).contains(theta) {
                    return Err(Error::invalid_argument(format!(
                        "string method theta must lie in [0, 1), got {theta}"
                    )));
                }
                if *q < 2 {
                    return Err(Error::invalid_argument(format!(
                        "string method q must be at least 2, got {q}"
                    )));
                }
            }
            if !kinds.insert(m.kind()) {
                return Err(Error::invalid_argument(format!(
                    "method {} given twice",
                    m.kind()
                )));
            }
        }
        Ok(LinkSpec {
            name: name.into(),
            source,
            target,
            methods,
            link_type,
            base_uri_source: base_uri_source.into(),
            base_uri_target: base_uri_target.into(),
        })
    }

    /// Occurrence counts of the source records, keyed by record id.
    pub fn source_occurrences(&self) -> BTreeMap<String, u64> {
        self.source
            .records()
            .iter()
            .map(|r| (r.id.clone(), r.occurrences))
            .collect()
    }
}

/// A link in the union, remembering every method that found it.
#[derive(Debug, Clone, PartialEq)]
pub struct OverallLink {
    pub source_id: String,
    pub target_id: String,
    pub methods: BTreeSet<MatchKind>,
    /// Highest score among the contributing methods.
    pub score: f64,
}

/// The outcome of one spec: per-method partitions plus their union.
#[derive(Debug, Clone)]
pub struct LinkSet {
    pub spec_name: String,
    pub per_method: BTreeMap<MatchKind, Vec<Link>>,
    pub overall: Vec<OverallLink>,
}

/// Pairs whose normalized match fields are equal; sorted and distinct.
pub fn exact_match(base: &EntitySet, target: &EntitySet) -> Vec<(String, String)> {
    let mut by_norm: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for t in target.records() {
        by_norm
            .entry(normalize(&t.match_field))
            .or_default()
            .push(&t.id);
    }
    let mut out = BTreeSet::new();
    for b in base.records() {
        if let Some(ids) = by_norm.get(&normalize(&b.match_field)) {
            for id in ids {
                out.insert((b.id.clone(), id.to_string()));
            }
        }
    }
    out.into_iter().collect()
}

/// Execute every method of the spec and union the discovered pairs.
///
/// A semantic method requires a thesaurus; asking for one without providing
/// it is a configuration error.
pub fn run_linkspec(spec: &LinkSpec, thesaurus: Option<&Thesaurus>) -> Result<LinkSet> {
    let mut per_method: BTreeMap<MatchKind, Vec<Link>> = BTreeMap::new();

    for method in &spec.methods {
        let links: Vec<Link> = match method {
            MethodSpec::Exact => exact_match(&spec.source, &spec.target)
                .into_iter()
                .map(|(s, t)| Link::new(s, t, MatchKind::Exact, 1.0, spec.link_type.clone()))
                .collect::<Result<_>>()?,
            MethodSpec::StringSim { theta, q } => {
                if spec.source.is_empty() || spec.target.is_empty() {
                    Vec::new()
                } else {
                    let values: Vec<&str> = spec
                        .source
                        .records()
                        .iter()
                        .map(|r| r.match_field.as_str())
                        .collect();
                    let w = WeightTable::build(&values, *q)?;
                    indexed_join(&spec.source, &spec.target, *theta, &w)?
                        .pairs
                        .into_iter()
                        .map(|p| {
                            Link::new(
                                p.base_id,
                                p.target_id,
                                MatchKind::String,
                                p.score,
                                spec.link_type.clone(),
                            )
                        })
                        .collect::<Result<_>>()?
                }
            }
            MethodSpec::Semantic { rel, depth } => {
                let th = thesaurus.ok_or_else(|| {
                    Error::Config(format!(
                        "spec {:?} requests semantic matching but no thesaurus was provided",
                        spec.name
                    ))
                })?;
                semantic_join_with_depth(&spec.source, &spec.target, th, rel, *depth)
                    .into_iter()
                    .map(|(s, t)| {
                        Link::new(s, t, MatchKind::Semantic, 1.0, spec.link_type.clone())
                    })
                    .collect::<Result<_>>()?
            }
        };
        per_method.insert(method.kind(), links);
    }

    let mut union: BTreeMap<(String, String), (BTreeSet<MatchKind>, f64)> = BTreeMap::new();
    for (kind, links) in &per_method {
        for link in links {
            let entry = union
                .entry((link.source_id.clone(), link.target_id.clone()))
                .or_insert_with(|| (BTreeSet::new(), 0.0));
            entry.0.insert(*kind);
            entry.1 = entry.1.max(link.score);
        }
    }
    let overall = union
        .into_iter()
        .map(|((source_id, target_id), (methods, score))| OverallLink {
            source_id,
            target_id,
            methods,
            score,
        })
        .collect();

    Ok(LinkSet {
        spec_name: spec.name.clone(),
        per_method,
        overall,
    })
}

/// Row label in the stats table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StatLabel {
    Method(MatchKind),
    Overall,
}

impl StatLabel {
    pub fn name(&self) -> &'static str {
        match self {
            StatLabel::Method(k) => k.label(),
            StatLabel::Overall => "overall",
        }
    }
}

/// Raw counts for one method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodCounts {
    pub link_count: u64,
    pub linked_entity_count: u64,
}

/// One stats table row: counts plus percentage improvement over exact
/// matching, rounded to one decimal. Diffs are absent on the exact row and
/// whenever the exact baseline is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodStats {
    pub label: StatLabel,
    pub link_count: u64,
    pub link_diff_pct: Option<f64>,
    pub linked_entity_count: u64,
    pub entity_diff_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub rows: Vec<MethodStats>,
}

fn diff_pct(count: u64, baseline: u64) -> Option<f64> {
    if baseline == 0 {
        return None;
    }
    let raw = 100.0 * (count as f64 - baseline as f64) / baseline as f64;
    Some((raw * 10.0).round() / 10.0)
}

impl StatsRow {
    /// Derive diff percentages from raw per-method counts. The exact row, if
    /// present, is the baseline and carries no diff itself.
    pub fn from_counts(counts: Vec<(StatLabel, MethodCounts)>) -> StatsRow {
        let baseline = counts
            .iter()
            .find(|(label, _)| *label == StatLabel::Method(MatchKind::Exact))
            .map(|(_, c)| *c);
        let rows = counts
            .into_iter()
            .map(|(label, c)| {
                let is_exact = label == StatLabel::Method(MatchKind::Exact);
                let (link_diff, entity_diff) = match (&baseline, is_exact) {
                    (Some(b), false) => (
                        diff_pct(c.link_count, b.link_count),
                        diff_pct(c.linked_entity_count, b.linked_entity_count),
                    ),
                    _ => (None, None),
                };
                MethodStats {
                    label,
                    link_count: c.link_count,
                    link_diff_pct: link_diff,
                    linked_entity_count: c.linked_entity_count,
                    entity_diff_pct: entity_diff,
                }
            })
            .collect();
        StatsRow { rows }
    }

    pub fn row(&self, label: StatLabel) -> Option<&MethodStats> {
        self.rows.iter().find(|r| r.label == label)
    }
}

fn count_partition<'a, I>(pairs: I, occurrences: &BTreeMap<String, u64>) -> Result<MethodCounts>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut link_count = 0u64;
    let mut sources = BTreeSet::new();
    for (source, _target) in pairs {
        let occ = occurrences.get(source).ok_or_else(|| {
            Error::Data(format!("no occurrence count for source entity {source:?}"))
        })?;
        link_count += occ;
        sources.insert(source);
    }
    Ok(MethodCounts {
        link_count,
        linked_entity_count: sources.len() as u64,
    })
}

/// Fan-out statistics: each matched source entity counts once per
/// referencing trial (its occurrence count), targets count once.
pub fn compute_stats(ls: &LinkSet, occurrences: &BTreeMap<String, u64>) -> Result<StatsRow> {
    let mut counts = Vec::new();
    for (kind, links) in &ls.per_method {
        counts.push((
            StatLabel::Method(*kind),
            count_partition(
                links
                    .iter()
                    .map(|l| (l.source_id.as_str(), l.target_id.as_str())),
                occurrences,
            )?,
        ));
    }
    counts.push((
        StatLabel::Overall,
        count_partition(
            ls.overall
                .iter()
                .map(|l| (l.source_id.as_str(), l.target_id.as_str())),
            occurrences,
        )?,
    ));
    Ok(StatsRow::from_counts(counts))
}

/// One triple per overall link, `<source> <link predicate> <target>`.
pub fn emit_links(ls: &LinkSet, spec: &LinkSpec) -> Result<Vec<Triple>> {
    ls.overall
        .iter()
        .map(|link| {
            Ok(Triple::uri(
                mint_uri(
                    &spec.base_uri_source,
                    &spec.source.entity_type,
                    &link.source_id,
                )?,
                spec.link_type.predicate().clone(),
                mint_uri(
                    &spec.base_uri_target,
                    &spec.target.entity_type,
                    &link.target_id,
                )?,
            ))
        })
        .collect()
}

/// Write the stats table as TSV, one row group per spec.
pub fn write_stats_tsv<W: Write>(
    groups: &[(String, StatsRow)],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(
        w,
        "spec\tmethod\tlink_count\tlink_diff_pct\tlinked_entity_count\tentity_diff_pct"
    )?;
    for (name, stats) in groups {
        for row in &stats.rows {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}",
                name,
                row.label.name(),
                row.link_count,
                fmt_diff(row.link_diff_pct),
                row.linked_entity_count,
                fmt_diff(row.entity_diff_pct),
            )?;
        }
    }
    Ok(())
}

fn fmt_diff(diff: Option<f64>) -> String {
    match diff {
        Some(d) => format!("{d:+.1}%"),
        None => String::new(),
    }
}

// ---------------------------------------------------------------------------
// External interfaces: entity set CSV and the link spec config file.
// ---------------------------------------------------------------------------

/// Load an entity set from CSV with header `id,name[,occurrences]`.
/// A missing occurrences column (or empty value) defaults to 1.
pub fn load_entity_set_csv(
    path: impl AsRef<Path>,
    name: &str,
    entity_type: &str,
) -> Result<EntitySet> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(|e| csv_error(e, path))?;
    let headers = reader.headers().map_err(|e| csv_error(e, path))?.clone();
    let idx = |col: &str| headers.iter().position(|h| h == col);
    let (id_idx, name_idx) = match (idx("id"), idx("name")) {
        (Some(i), Some(n)) => (i, n),
        _ => {
            return Err(Error::Parse {
                path: Some(path.to_path_buf()),
                line: 1,
                column: 0,
                message: format!(
                    "expected header with `id` and `name` columns, found {:?}",
                    headers.iter().collect::<Vec<_>>()
                ),
            })
        }
    };
    let occ_idx = idx("occurrences");

    let mut records = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| csv_error(e, path))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let id = record.get(id_idx).unwrap_or("").trim().to_string();
        let field = record.get(name_idx).unwrap_or("").trim().to_string();
        if id.is_empty() {
            return Err(Error::Parse {
                path: Some(path.to_path_buf()),
                line,
                column: 0,
                message: "empty id".to_string(),
            });
        }
        let occurrences = match occ_idx.and_then(|i| record.get(i)).map(str::trim) {
            None | Some("") => 1,
            Some(raw) => raw.parse::<u64>().map_err(|_| Error::Parse {
                path: Some(path.to_path_buf()),
                line,
                column: 0,
                message: format!("invalid occurrences value {raw:?}"),
            })?,
        };
        records.push(EntityRecord::new(id, field, occurrences));
    }
    EntitySet::new(name, entity_type, records)
}

fn csv_error(e: csv::Error, path: &Path) -> Error {
    let line = match e.position() {
        Some(p) => p.line(),
        None => 0,
    };
    Error::Parse {
        path: Some(path.to_path_buf()),
        line,
        column: 0,
        message: e.to_string(),
    }
}

/// Deserialized form of one `[[spec]]` block in the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub name: String,
    pub source_csv: PathBuf,
    pub target_csv: PathBuf,
    pub link_type: String,
    pub base_uri_source: String,
    pub base_uri_target: String,
    /// Defaults to the source CSV file stem.
    pub source_type: Option<String>,
    /// Defaults to the target CSV file stem.
    pub target_type: Option<String>,
    pub methods: MethodsConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodsConfig {
    #[serde(default)]
    pub exact: bool,
    pub string: Option<StringMethodConfig>,
    pub semantic: Option<SemanticMethodConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StringMethodConfig {
    pub theta: f64,
    #[serde(default = "default_q")]
    pub q: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemanticMethodConfig {
    pub thesaurus: PathBuf,
    #[serde(default = "default_rel")]
    pub rel: String,
    #[serde(default)]
    pub depth: usize,
}

fn default_q() -> usize {
    2
}

fn default_rel() -> String {
    SYNONYM.to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default, rename = "spec")]
    specs: Vec<SpecConfig>,
}

/// Parse a link spec config file (TOML).
pub fn load_link_config(path: impl AsRef<Path>) -> Result<Vec<SpecConfig>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_link_config(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn parse_link_config(text: &str) -> Result<Vec<SpecConfig>> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if file.specs.is_empty() {
        return Err(Error::Config("config contains no [[spec]] blocks".to_string()));
    }
    Ok(file.specs)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "set".to_string())
}

impl SpecConfig {
    /// Load the referenced CSVs and thesaurus (paths are resolved relative
    /// to `base_dir`) and build the runnable spec.
    pub fn resolve(&self, base_dir: &Path) -> Result<(LinkSpec, Option<Thesaurus>)> {
        let join = |p: &Path| {
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base_dir.join(p)
            }
        };
        let source_type = self
            .source_type
            .clone()
            .unwrap_or_else(|| file_stem(&self.source_csv));
        let target_type = self
            .target_type
            .clone()
            .unwrap_or_else(|| file_stem(&self.target_csv));
        let source = load_entity_set_csv(join(&self.source_csv), &source_type, &source_type)?;
        let target = load_entity_set_csv(join(&self.target_csv), &target_type, &target_type)?;

        let mut methods = Vec::new();
        if self.methods.exact {
            methods.push(MethodSpec::Exact);
        }
        if let Some(s) = &self.methods.string {
            methods.push(MethodSpec::StringSim {
                theta: s.theta,
                q: s.q,
            });
        }
        let mut thesaurus = None;
        if let Some(sem) = &self.methods.semantic {
            methods.push(MethodSpec::Semantic {
                rel: sem.rel.clone(),
                depth: sem.depth,
            });
            thesaurus = Some(crate::semjoin::load_thesaurus(join(&sem.thesaurus))?);
        }

        let spec = LinkSpec::new(
            self.name.clone(),
            source,
            target,
            methods,
            LinkType::parse(&self.link_type)?,
            self.base_uri_source.clone(),
            self.base_uri_target.clone(),
        )?;
        Ok((spec, thesaurus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vocab;

    fn set(name: &str, rows: &[(&str, &str, u64)]) -> EntitySet {
        let records = rows
            .iter()
            .map(|(id, field, occ)| EntityRecord::new(*id, *field, *occ))
            .collect();
        EntitySet::new(name, name, records).unwrap()
    }

    fn simple_spec(source: EntitySet, target: EntitySet, methods: Vec<MethodSpec>) -> LinkSpec {
        LinkSpec::new(
            "test",
            source,
            target,
            methods,
            LinkType::parse("owl:sameAs").unwrap(),
            "http://example.org/resource",
            "http://example.org/external",
        )
        .unwrap()
    }

    #[test]
    fn exact_match_uses_normalized_fields() {
        let base = set("b", &[("b1", "AIDS", 1)]);
        let target = set("t", &[("t1", "aids", 1)]);
        assert_eq!(
            exact_match(&base, &target),
            vec![("b1".to_string(), "t1".to_string())]
        );
    }

    #[test]
    fn exact_match_misses_spelling_variants() {
        let base = set("b", &[("b1", "Thalassemia", 1)]);
        let target = set("t", &[("t1", "Thalassaemia", 1)]);
        assert!(exact_match(&base, &target).is_empty());
        let disjoint = set("t", &[("t1", "asthma", 1)]);
        assert!(exact_match(&base, &disjoint).is_empty());
    }

    #[test]
    fn exact_only_spec_has_exact_overall() {
        let base = set("b", &[("b1", "aids", 3)]);
        let target = set("t", &[("t1", "AIDS", 1)]);
        let spec = simple_spec(base, target, vec![MethodSpec::Exact]);
        let ls = run_linkspec(&spec, None).unwrap();
        assert_eq!(ls.per_method[&MatchKind::Exact].len(), 1);
        assert_eq!(ls.overall.len(), 1);
        assert_eq!(
            ls.overall[0].methods,
            BTreeSet::from([MatchKind::Exact])
        );
    }

    #[test]
    fn union_keeps_provenance_of_all_methods() {
        // P1 is found by exact, string and semantic; P2 only semantically
        let th = Thesaurus::parse("C\ttylenol\nC\tparacetamol\n").unwrap();
        let base = set("b", &[("b1", "tylenol", 1)]);
        let target = set("t", &[("t1", "tylenol", 1), ("t2", "paracetamol", 1)]);
        let spec = simple_spec(
            base,
            target,
            vec![
                MethodSpec::Exact,
                MethodSpec::StringSim { theta: 0.5, q: 2 },
                MethodSpec::Semantic {
                    rel: SYNONYM.to_string(),
                    depth: 0,
                },
            ],
        );
        let ls = run_linkspec(&spec, Some(&th)).unwrap();
        assert_eq!(ls.overall.len(), 2);
        let p1 = ls
            .overall
            .iter()
            .find(|l| l.target_id == "t1")
            .expect("P1 missing");
        assert_eq!(
            p1.methods,
            BTreeSet::from([MatchKind::Exact, MatchKind::String, MatchKind::Semantic])
        );
        let p2 = ls
            .overall
            .iter()
            .find(|l| l.target_id == "t2")
            .expect("P2 missing");
        assert_eq!(p2.methods, BTreeSet::from([MatchKind::Semantic]));
    }

    #[test]
    fn semantic_without_thesaurus_is_a_config_error() {
        let base = set("b", &[("b1", "x", 1)]);
        let target = set("t", &[("t1", "x", 1)]);
        let spec = simple_spec(
            base,
            target,
            vec![MethodSpec::Semantic {
                rel: SYNONYM.to_string(),
                depth: 0,
            }],
        );
        match run_linkspec(&spec, None).unwrap_err() {
            Error::Config(_) => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn diff_pct_reproduces_published_arithmetic() {
        let row = StatsRow::from_counts(vec![
            (
                StatLabel::Method(MatchKind::Exact),
                MethodCounts { link_count: 164, linked_entity_count: 164 },
            ),
            (
                StatLabel::Overall,
                MethodCounts { link_count: 342, linked_entity_count: 342 },
            ),
        ]);
        let overall = row.row(StatLabel::Overall).unwrap();
        assert_eq!(overall.link_diff_pct, Some(108.5));

        let row = StatsRow::from_counts(vec![
            (
                StatLabel::Method(MatchKind::Exact),
                MethodCounts { link_count: 8442, linked_entity_count: 867 },
            ),
            (
                StatLabel::Method(MatchKind::String),
                MethodCounts { link_count: 9716, linked_entity_count: 1558 },
            ),
            (
                StatLabel::Overall,
                MethodCounts { link_count: 11527, linked_entity_count: 1913 },
            ),
        ]);
        assert_eq!(
            row.row(StatLabel::Overall).unwrap().link_diff_pct,
            Some(36.5)
        );
        assert_eq!(
            row.row(StatLabel::Method(MatchKind::String))
                .unwrap()
                .entity_diff_pct,
            Some(79.7)
        );
    }

    #[test]
    fn equal_counts_give_zero_diff_and_zero_baseline_gives_none() {
        let row = StatsRow::from_counts(vec![
            (
                StatLabel::Method(MatchKind::Exact),
                MethodCounts { link_count: 10, linked_entity_count: 5 },
            ),
            (
                StatLabel::Method(MatchKind::String),
                MethodCounts { link_count: 10, linked_entity_count: 5 },
            ),
        ]);
        assert_eq!(
            row.row(StatLabel::Method(MatchKind::String)).unwrap().link_diff_pct,
            Some(0.0)
        );

        let row = StatsRow::from_counts(vec![
            (
                StatLabel::Method(MatchKind::Exact),
                MethodCounts { link_count: 0, linked_entity_count: 0 },
            ),
            (
                StatLabel::Overall,
                MethodCounts { link_count: 7, linked_entity_count: 7 },
            ),
        ]);
        assert_eq!(row.row(StatLabel::Overall).unwrap().link_diff_pct, None);
    }

    #[test]
    fn fan_out_counts_each_referencing_trial() {
        let base = set("b", &[("b1", "aids", 10)]);
        let target = set("t", &[("t1", "aids", 1)]);
        let spec = simple_spec(base, target, vec![MethodSpec::Exact]);
        let ls = run_linkspec(&spec, None).unwrap();
        let stats = compute_stats(&ls, &spec.source_occurrences()).unwrap();
        let exact = stats.row(StatLabel::Method(MatchKind::Exact)).unwrap();
        assert_eq!(exact.link_count, 10);
        assert_eq!(exact.linked_entity_count, 1);
    }

    #[test]
    fn missing_occurrence_entry_is_a_data_error() {
        let base = set("b", &[("b1", "aids", 1)]);
        let target = set("t", &[("t1", "aids", 1)]);
        let spec = simple_spec(base, target, vec![MethodSpec::Exact]);
        let ls = run_linkspec(&spec, None).unwrap();
        match compute_stats(&ls, &BTreeMap::new()).unwrap_err() {
            Error::Data(msg) => assert!(msg.contains("b1")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn emitted_links_expand_the_vocabulary() {
        let base = set("condition", &[("b1", "aids", 1)]);
        let target = set("disease", &[("t1", "aids", 1)]);
        let mut spec = simple_spec(base, target, vec![MethodSpec::Exact]);
        spec.link_type = LinkType::parse("rdfs:seeAlso").unwrap();
        let ls = run_linkspec(&spec, None).unwrap();
        let triples = emit_links(&ls, &spec).unwrap();
        assert_eq!(triples.len(), 1);
        assert_eq!(triples[0].predicate.as_str(), vocab::RDFS_SEE_ALSO);
        assert_eq!(
            triples[0].subject.as_str(),
            "http://example.org/resource/condition/b1"
        );
    }

    #[test]
    fn empty_link_set_emits_nothing() {
        let base = set("b", &[("b1", "aids", 1)]);
        let target = set("t", &[("t1", "zzz", 1)]);
        let spec = simple_spec(base, target, vec![MethodSpec::Exact]);
        let ls = run_linkspec(&spec, None).unwrap();
        assert!(emit_links(&ls, &spec).unwrap().is_empty());
    }

    #[test]
    fn duplicate_methods_are_rejected() {
        let base = set("b", &[("b1", "x", 1)]);
        let target = set("t", &[("t1", "x", 1)]);
        let result = LinkSpec::new(
            "dup",
            base,
            target,
            vec![MethodSpec::Exact, MethodSpec::Exact],
            LinkType::parse("owl:sameAs").unwrap(),
            "http://example.org/a",
            "http://example.org/b",
        );
        assert!(result.is_err());
    }

    #[test]
    fn stats_tsv_shape() {
        let row = StatsRow::from_counts(vec![
            (
                StatLabel::Method(MatchKind::Exact),
                MethodCounts { link_count: 164, linked_entity_count: 164 },
            ),
            (
                StatLabel::Overall,
                MethodCounts { link_count: 342, linked_entity_count: 342 },
            ),
        ]);
        let mut out = Vec::new();
        write_stats_tsv(&[("condition-dbpedia".to_string(), row)], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("condition-dbpedia\texact\t164\t\t164\t"));
        assert!(lines[2].contains("+108.5%"));
    }

    #[test]
    fn config_round_trip() {
        let text = r#"
# one block per linkage scenario
[[spec]]
name = "condition-dbpedia"
source_csv = "conditions.csv"
target_csv = "dbpedia_disease.csv"
link_type = "owl:sameAs"
base_uri_source = "http://example.org/resource"
base_uri_target = "http://example.org/external/dbpedia"

[spec.methods]
exact = true

[spec.methods.string]
theta = 0.4

[spec.methods.semantic]
thesaurus = "thesaurus.tsv"
depth = 1
"#;
        let specs = parse_link_config(text).unwrap();
        assert_eq!(specs.len(), 1);
        let spec = &specs[0];
        assert!(spec.methods.exact);
        assert_eq!(spec.methods.string.as_ref().unwrap().theta, 0.4);
        assert_eq!(spec.methods.string.as_ref().unwrap().q, 2);
        let sem = spec.methods.semantic.as_ref().unwrap();
        assert_eq!(sem.rel, SYNONYM);
        assert_eq!(sem.depth, 1);
    }

    #[test]
    fn config_without_specs_is_rejected() {
        assert!(parse_link_config("").is_err());
        assert!(parse_link_config("[[spec]]\nname = \"x\"\n").is_err());
    }

    #[test]
    fn csv_loader_defaults_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let ok = dir.path().join("ok.csv");
        std::fs::write(&ok, "id,name,occurrences\nc1,AIDS,10\nc2,Asthma,\n").unwrap();
        let s = load_entity_set_csv(&ok, "cond", "condition").unwrap();
        assert_eq!(s.records()[0].occurrences, 10);
        assert_eq!(s.records()[1].occurrences, 1);

        let no_occ = dir.path().join("no_occ.csv");
        std::fs::write(&no_occ, "id,name\nc1,AIDS\n").unwrap();
        let s = load_entity_set_csv(&no_occ, "cond", "condition").unwrap();
        assert_eq!(s.records()[0].occurrences, 1);

        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "id,name,occurrences\nc1,AIDS,ten\n").unwrap();
        match load_entity_set_csv(&bad, "cond", "condition").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }

        let dup = dir.path().join("dup.csv");
        std::fs::write(&dup, "id,name\nc1,AIDS\nc1,Asthma\n").unwrap();
        assert!(matches!(
            load_entity_set_csv(&dup, "cond", "condition").unwrap_err(),
            Error::DuplicateKey(_)
        ));

        let missing_header = dir.path().join("hdr.csv");
        std::fs::write(&missing_header, "key,value\n1,2\n").unwrap();
        assert!(load_entity_set_csv(&missing_header, "c", "c").is_err());
    }
}
