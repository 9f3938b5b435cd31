//! Triplification of clinical-trial-style XML into a normalized RDF entity
//! graph, plus typed link discovery between entity sets via exact matching,
//! RSJ-weighted Jaccard string matching over q-grams, and thesaurus-based
//! semantic matching.

pub mod error;
pub mod ingest;
pub mod linkpipe;
pub mod model;
pub mod ntriples;
pub mod qgram;
pub mod semjoin;
pub mod simjoin;

pub use error::{Error, Result};
pub use model::{EntityRecord, EntitySet, Link, LinkType, MatchKind, Triple, Uri};
