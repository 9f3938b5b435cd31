//! Core domain types shared by every other module: entities, URIs, triples
//! and typed links.

use std::fmt;

use crate::error::{Error, Result};

/// Well-known predicates used when emitting triples.
pub mod vocab {
    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const RDFS_SEE_ALSO: &str = "http://www.w3.org/2000/01/rdf-schema#seeAlso";
    pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
    pub const FOAF_BASED_NEAR: &str = "http://xmlns.com/foaf/0.1/based_near";
    pub const FOAF_PAGE: &str = "http://xmlns.com/foaf/0.1/page";
}

/// An absolute `http(s)` IRI.
///
/// Validation is deliberately strict enough that every accepted value can be
/// written verbatim inside `<...>` in an N-Triples line: no whitespace, no
/// angle brackets, no double quotes, no control characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uri(String);

impl Uri {
    pub fn new(value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        if value.is_empty() {
            return Err(Error::invalid_argument("URI must not be empty"));
        }
        if !value.starts_with("http://") && !value.starts_with("https://") {
            return Err(Error::invalid_argument(format!(
                "URI must start with http:// or https://: {value:?}"
            )));
        }
        if let Some(bad) = value
            .chars()
            .find(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"'))
        {
            return Err(Error::invalid_argument(format!(
                "URI contains forbidden character {bad:?}: {value:?}"
            )));
        }
        Ok(Uri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Uri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Object position of a triple: either a URI or a plain literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TripleObject {
    Uri(Uri),
    Literal(String),
}

/// One RDF statement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Uri,
    pub predicate: Uri,
    pub object: TripleObject,
}

impl Triple {
    pub fn uri(subject: Uri, predicate: Uri, object: Uri) -> Self {
        Triple {
            subject,
            predicate,
            object: TripleObject::Uri(object),
        }
    }

    pub fn literal(subject: Uri, predicate: Uri, object: impl Into<String>) -> Self {
        Triple {
            subject,
            predicate,
            object: TripleObject::Literal(object.into()),
        }
    }
}

/// One entity in an [`EntitySet`].
///
/// `occurrences` counts how many distinct trials reference the entity; it
/// drives the fan-out link counting in the stats. Target-side records loaded
/// from external sources default to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityRecord {
    pub id: String,
    pub match_field: String,
    pub occurrences: u64,
}

impl EntityRecord {
    pub fn new(id: impl Into<String>, match_field: impl Into<String>, occurrences: u64) -> Self {
        EntityRecord {
            id: id.into(),
            match_field: match_field.into(),
            occurrences,
        }
    }
}

/// A named collection of entities with pairwise-distinct record ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySet {
    pub name: String,
    pub entity_type: String,
    records: Vec<EntityRecord>,
}

impl EntitySet {
    pub fn new(
        name: impl Into<String>,
        entity_type: impl Into<String>,
        records: Vec<EntityRecord>,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::invalid_argument("entity set name must not be empty"));
        }
        let mut seen = std::collections::HashSet::new();
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::DuplicateKey(format!(
                    "record id {:?} appears twice in entity set {:?}",
                    r.id, name
                )));
            }
        }
        Ok(EntitySet {
            name,
            entity_type: entity_type.into(),
            records,
        })
    }

    pub fn records(&self) -> &[EntityRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record(&self, id: &str) -> Option<&EntityRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

/// How a link was discovered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatchKind {
    Exact,
    String,
    Semantic,
}

impl MatchKind {
    pub fn label(&self) -> &'static str {
        match self {
            MatchKind::Exact => "exact",
            MatchKind::String => "string",
            MatchKind::Semantic => "semantic",
        }
    }
}

impl fmt::Display for MatchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Predicate used for emitted links.
///
/// Accepts the short names of the standard vocabulary or any absolute
/// `http(s)` URI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkType(Uri);

impl LinkType {
    pub fn new(predicate: Uri) -> Self {
        LinkType(predicate)
    }

    /// Parse `owl:sameAs`, `rdfs:seeAlso`, `foaf:based_near`, `foaf:page`
    /// or a full URI.
    pub fn parse(name: &str) -> Result<Self> {
        let uri = match name {
            "owl:sameAs" => Uri::new(vocab::OWL_SAME_AS)?,
            "rdfs:seeAlso" => Uri::new(vocab::RDFS_SEE_ALSO)?,
            "foaf:based_near" => Uri::new(vocab::FOAF_BASED_NEAR)?,
            "foaf:page" => Uri::new(vocab::FOAF_PAGE)?,
            other => Uri::new(other).map_err(|_| {
                Error::invalid_argument(format!(
                    "unknown link type {other:?}; expected owl:sameAs, rdfs:seeAlso, \
                     foaf:based_near, foaf:page or an absolute http(s) URI"
                ))
            })?,
        };
        Ok(LinkType(uri))
    }

    pub fn predicate(&self) -> &Uri {
        &self.0
    }
}

/// A discovered link between a source and a target record.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub source_id: String,
    pub target_id: String,
    pub method: MatchKind,
    pub score: f64,
    pub link_type: LinkType,
}

impl Link {
    /// Exact and semantic links always carry score 1.0; string links carry
    /// their similarity score, which must lie in `[0, 1]`.
    pub fn new(
        source_id: impl Into<String>,
        target_id: impl Into<String>,
        method: MatchKind,
        score: f64,
        link_type: LinkType,
    ) -> Result<Self> {
        let score = match method {
            MatchKind::Exact | MatchKind::Semantic => 1.0,
            MatchKind::String => {
                if !(0.0..=1.0).contains(&score) {
                    return Err(Error::invalid_argument(format!(
                        "link score {score} outside [0, 1]"
                    )));
                }
                score
            }
        };
        Ok(Link {
            source_id: source_id.into(),
            target_id: target_id.into(),
            method,
            score,
            link_type,
        })
    }
}

/// Matching key shared by ingest dedup, exact matching and thesaurus lookup:
/// trimmed, lowercased, internal whitespace runs collapsed to one space.
pub fn normalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for c in s.trim().chars() {
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && !out.is_empty() {
            out.push(' ');
        }
        pending_space = false;
        for lc in c.to_lowercase() {
            out.push(lc);
        }
    }
    out
}

/// URI path segment: lowercased, runs of non-alphanumeric characters folded
/// to a single `_`, leading/trailing `_` trimmed. Alphanumeric means Unicode
/// alphanumeric, so diacritics survive.
pub fn slug(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_sep = false;
    for c in s.chars() {
        if c.is_alphanumeric() {
            if pending_sep && !out.is_empty() {
                out.push('_');
            }
            pending_sep = false;
            for lc in c.to_lowercase() {
                out.push(lc);
            }
        } else {
            pending_sep = true;
        }
    }
    out
}

/// Mint a deterministic entity URI `<base>/<entity_type>/<slug(key)>`.
///
/// The type segment goes through the same slug rule as the key so that the
/// result is always a valid URI. Equal inputs yield equal URIs.
pub fn mint_uri(base: &str, entity_type: &str, key: &str) -> Result<Uri> {
    if entity_type.is_empty() {
        return Err(Error::invalid_argument("entity_type must not be empty"));
    }
    if key.is_empty() {
        return Err(Error::invalid_argument("key must not be empty"));
    }
    let type_slug = slug(entity_type);
    let key_slug = slug(key);
    if type_slug.is_empty() {
        return Err(Error::invalid_argument(format!(
            "entity_type {entity_type:?} is empty after slugging"
        )));
    }
    if key_slug.is_empty() {
        return Err(Error::invalid_argument(format!(
            "key {key:?} is empty after slugging"
        )));
    }
    let base = base.trim_end_matches('/');
    Uri::new(format!("{base}/{type_slug}/{key_slug}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mint_uri_slugs_keys() {
        let uri = mint_uri("http://example.org/resource", "trial", "NCT00001").unwrap();
        assert_eq!(uri.as_str(), "http://example.org/resource/trial/nct00001");

        let uri = mint_uri("http://example.org/resource", "condition", "Alzheimer's Disease")
            .unwrap();
        assert_eq!(
            uri.as_str(),
            "http://example.org/resource/condition/alzheimer_s_disease"
        );
    }

    #[test]
    fn mint_uri_rejects_blank_key() {
        assert!(mint_uri("http://example.org/resource", "condition", "  ").is_err());
        assert!(mint_uri("http://example.org/resource", "", "x").is_err());
        assert!(mint_uri("http://example.org/resource", "t", "").is_err());
    }

    #[test]
    fn mint_uri_is_deterministic() {
        let a = mint_uri("http://example.org/resource/", "condition", "AIDS").unwrap();
        let b = mint_uri("http://example.org/resource", "condition", "AIDS").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn slug_folds_separator_runs() {
        assert_eq!(slug("Alzheimer's  --  Disease"), "alzheimer_s_disease");
        assert_eq!(slug("__x__"), "x");
        assert_eq!(slug("Aβ-42"), "aβ_42");
    }

    #[test]
    fn normalize_collapses_case_and_whitespace() {
        assert_eq!(normalize("  Acquired\tImmunodeficiency  SYNDROME "), "acquired immunodeficiency syndrome");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("AIDS"), "aids");
    }

    #[test]
    fn uri_validation() {
        assert!(Uri::new("http://example.org/a").is_ok());
        assert!(Uri::new("https://example.org/a").is_ok());
        assert!(Uri::new("ftp://example.org").is_err());
        assert!(Uri::new("http://example.org/a b").is_err());
        assert!(Uri::new("http://example.org/<x>").is_err());
        assert!(Uri::new("").is_err());
    }

    #[test]
    fn link_type_vocabulary() {
        assert_eq!(
            LinkType::parse("owl:sameAs").unwrap().predicate().as_str(),
            "http://www.w3.org/2002/07/owl#sameAs"
        );
        assert_eq!(
            LinkType::parse("rdfs:seeAlso").unwrap().predicate().as_str(),
            "http://www.w3.org/2000/01/rdf-schema#seeAlso"
        );
        assert_eq!(
            LinkType::parse("foaf:based_near").unwrap().predicate().as_str(),
            "http://xmlns.com/foaf/0.1/based_near"
        );
        assert!(LinkType::parse("http://example.org/rel/custom").is_ok());
        assert!(LinkType::parse("nonsense").is_err());
    }

    #[test]
    fn link_scores_follow_method() {
        let lt = LinkType::parse("owl:sameAs").unwrap();
        let exact = Link::new("a", "b", MatchKind::Exact, 0.2, lt.clone()).unwrap();
        assert_eq!(exact.score, 1.0);
        let sem = Link::new("a", "b", MatchKind::Semantic, 0.0, lt.clone()).unwrap();
        assert_eq!(sem.score, 1.0);
        let s = Link::new("a", "b", MatchKind::String, 0.75, lt.clone()).unwrap();
        assert_eq!(s.score, 0.75);
        assert!(Link::new("a", "b", MatchKind::String, 1.5, lt).is_err());
    }

    #[test]
    fn entity_set_rejects_duplicate_ids() {
        let recs = vec![
            EntityRecord::new("x", "A", 1),
            EntityRecord::new("x", "B", 1),
        ];
        assert!(EntitySet::new("s", "condition", recs).is_err());
    }
}
