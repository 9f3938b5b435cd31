//! Thesaurus-backed semantic matching.
//!
//! A thesaurus row maps a concept id (`src`) to a term (`tgt`) under a
//! relationship type (`rel`, defaulting to `synonym`). Two values match
//! semantically when they share a concept. Non-synonym rows additionally
//! induce concept-to-concept edges for depth-limited traversal: an entry
//! `(A, t, rel)` links concept `A` to every concept that `t` is a term of.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{normalize, EntitySet};

pub const SYNONYM: &str = "synonym";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThesaurusEntry {
    pub src: String,
    pub tgt: String,
    pub rel: String,
}

#[derive(Debug, Clone, Default)]
pub struct Thesaurus {
    entries: Vec<ThesaurusEntry>,
    /// normalized term -> concept ids (any relationship type)
    term_index: BTreeMap<String, BTreeSet<String>>,
    /// concept id -> normalized terms (any relationship type)
    concept_index: BTreeMap<String, BTreeSet<String>>,
}

impl Thesaurus {
    pub fn new(entries: Vec<ThesaurusEntry>) -> Self {
        let mut th = Thesaurus::default();
        let mut seen = BTreeSet::new();
        for e in entries {
            if !seen.insert((e.src.clone(), e.tgt.clone(), e.rel.clone())) {
                continue;
            }
            let term = normalize(&e.tgt);
            th.term_index
                .entry(term.clone())
                .or_default()
                .insert(e.src.clone());
            th.concept_index
                .entry(e.src.clone())
                .or_default()
                .insert(term);
            th.entries.push(e);
        }
        th
    }

    /// Parse from `src<TAB>tgt[<TAB>rel]` lines. `#`-prefixed and blank
    /// lines are ignored; a missing `rel` column defaults to `synonym`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(Error::Parse {
                    path: None,
                    line: idx as u64 + 1,
                    column: 0,
                    message: format!(
                        "expected src<TAB>tgt[<TAB>rel], found {} field(s)",
                        fields.len()
                    ),
                });
            }
            entries.push(ThesaurusEntry {
                src: fields[0].trim().to_string(),
                tgt: fields[1].trim().to_string(),
                rel: fields
                    .get(2)
                    .map(|r| r.trim().to_string())
                    .unwrap_or_else(|| SYNONYM.to_string()),
            });
        }
        Ok(Thesaurus::new(entries))
    }

    pub fn entries(&self) -> &[ThesaurusEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn concept_count(&self) -> usize {
        self.concept_index.len()
    }

    /// Concept ids listing the given term, under any relationship type.
    /// Lookup is case-insensitive and whitespace-collapsed.
    pub fn concepts_of(&self, term: &str) -> BTreeSet<String> {
        self.term_index
            .get(&normalize(term))
            .cloned()
            .unwrap_or_default()
    }

    fn concept_terms(&self, concept: &str) -> BTreeSet<String> {
        self.concept_index
            .get(concept)
            .cloned()
            .unwrap_or_default()
    }

    /// Concept adjacency induced by `rel`-typed entries.
    fn edges(&self, rel: &str) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for e in &self.entries {
            if e.rel != rel {
                continue;
            }
            if let Some(dsts) = self.term_index.get(&normalize(&e.tgt)) {
                adj.entry(&e.src).or_default().extend(dsts.iter().map(String::as_str));
            }
        }
        adj
    }

    /// Concepts reachable from `seeds` in at most `depth` edge steps.
    fn reachable_concepts(
        &self,
        seeds: &BTreeSet<String>,
        rel: &str,
        depth: usize,
    ) -> BTreeSet<String> {
        let mut visited: BTreeSet<String> = seeds.clone();
        if depth == 0 {
            return visited;
        }
        let adj = self.edges(rel);
        let mut frontier: BTreeSet<String> = visited.clone();
        for _ in 0..depth {
            let mut next = BTreeSet::new();
            for concept in &frontier {
                if let Some(dsts) = adj.get(concept.as_str()) {
                    for dst in dsts {
                        if !visited.contains(*dst) {
                            next.insert(dst.to_string());
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            visited.extend(next.iter().cloned());
            frontier = next;
        }
        visited
    }
}

/// Load a thesaurus from a UTF-8 TSV file.
pub fn load_thesaurus(path: impl AsRef<Path>) -> Result<Thesaurus> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Thesaurus::parse(&text).map_err(|e| e.with_path(path))
}

/// Concept ids associated with a term; empty when the term is unknown.
pub fn concepts_of(term: &str, th: &Thesaurus) -> BTreeSet<String> {
    th.concepts_of(term)
}

/// All `(base_id, target_id)` pairs whose match fields share a concept.
/// Distinct and sorted.
pub fn semantic_join(
    base: &EntitySet,
    target: &EntitySet,
    th: &Thesaurus,
) -> Vec<(String, String)> {
    semantic_join_with_depth(base, target, th, SYNONYM, 0)
}

/// Depth-extended semantic join: a pair matches when a concept of the
/// target is reachable within `depth` `rel`-typed steps from a concept of
/// the base value. Depth 0 is plain concept intersection.
pub fn semantic_join_with_depth(
    base: &EntitySet,
    target: &EntitySet,
    th: &Thesaurus,
    rel: &str,
    depth: usize,
) -> Vec<(String, String)> {
    let mut out = BTreeSet::new();
    for b in base.records() {
        let seeds = th.concepts_of(&b.match_field);
        if seeds.is_empty() {
            continue;
        }
        let reach = th.reachable_concepts(&seeds, rel, depth);
        for t in target.records() {
            let target_concepts = th.concepts_of(&t.match_field);
            if target_concepts.iter().any(|c| reach.contains(c)) {
                out.insert((b.id.clone(), t.id.clone()));
            }
        }
    }
    out.into_iter().collect()
}

/// Terms related to `term`: at depth 0 the synonym ring (terms sharing a
/// direct concept), at depth `k` every term of a concept reachable within
/// `k` `rel`-typed steps. The input term itself is excluded; cycles
/// terminate via the visited set. Returned terms are normalized.
pub fn relation_closure(
    term: &str,
    th: &Thesaurus,
    rel: &str,
    depth: usize,
) -> BTreeSet<String> {
    let seeds = th.concepts_of(term);
    let reach = th.reachable_concepts(&seeds, rel, depth);
    let mut terms = BTreeSet::new();
    for concept in &reach {
        terms.extend(th.concept_terms(concept));
    }
    terms.remove(&normalize(term));
    terms
}
