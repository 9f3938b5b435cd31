//! Parse trial XML files into a normalized entity graph and emit it as RDF.
//!
//! Input schema: one `<clinical_study>` document per file with `<nct_id>`,
//! `<brief_title>`, repeated `<condition>`, repeated
//! `<intervention><type/><name/></intervention>`, repeated
//! `<location><facility/><city/><country/></location>`, repeated
//! `<reference><pmid/><citation/></reference>`, `<criteria>`, repeated
//! `<collaborator>`, `<overall_official>` and repeated `<primary_outcome>`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use quick_xml::events::Event;
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::model::{mint_uri, normalize, slug, vocab, EntityRecord, EntitySet, Triple, Uri};

/// Entity inventory, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    Trial,
    Condition,
    Intervention,
    Location,
    CollaboratorAgency,
    OverallOfficial,
    PrimaryOutcome,
    Reference,
    Criteria,
}

impl EntityType {
    pub const ALL: [EntityType; 9] = [
        EntityType::Trial,
        EntityType::Condition,
        EntityType::Intervention,
        EntityType::Location,
        EntityType::CollaboratorAgency,
        EntityType::OverallOfficial,
        EntityType::PrimaryOutcome,
        EntityType::Reference,
        EntityType::Criteria,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            EntityType::Trial => "trial",
            EntityType::Condition => "condition",
            EntityType::Intervention => "intervention",
            EntityType::Location => "location",
            EntityType::CollaboratorAgency => "collaborator_agency",
            EntityType::OverallOfficial => "overall_official",
            EntityType::PrimaryOutcome => "primary_outcome",
            EntityType::Reference => "reference",
            EntityType::Criteria => "criteria",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// One parsed trial document. Text content is whitespace-trimmed; absent
/// optional elements become empty lists or `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrialDocument {
    pub nct_id: String,
    pub brief_title: String,
    pub conditions: Vec<String>,
    /// `(type, name)` pairs, e.g. `("Drug", "Alemtuzumab")`.
    pub interventions: Vec<(String, String)>,
    /// `(facility, city, country)` triples.
    pub locations: Vec<(String, String, String)>,
    /// `(pmid, citation)` pairs.
    pub references: Vec<(String, String)>,
    pub criteria: String,
    pub collaborators: Vec<String>,
    pub overall_official: Option<String>,
    pub primary_outcomes: Vec<String>,
}

/// Parse one trial document from raw bytes.
pub fn parse_trial_xml(input: &[u8]) -> Result<TrialDocument> {
    let mut reader = Reader::from_reader(input);
    let mut doc = TrialDocument::default();
    let mut path: Vec<String> = Vec::new();
    let mut text: Vec<String> = Vec::new();
    let mut intervention = (String::new(), String::new());
    let mut location = (String::new(), String::new(), String::new());
    let mut reference = (String::new(), String::new());
    let mut saw_nct = false;
    let mut buf = Vec::new();

    loop {
        match reader.read_event_into(&mut buf) {
            Ok(Event::Start(e)) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                if path.last().map(String::as_str) == Some("clinical_study") {
                    match name.as_str() {
                        "intervention" => intervention = Default::default(),
                        "location" => location = Default::default(),
                        "reference" => reference = Default::default(),
                        _ => {}
                    }
                }
                path.push(name);
                text.push(String::new());
            }
            Ok(Event::Text(e)) => {
                if let Some(top) = text.last_mut() {
                    let decoded = e.decode().map_err(|err| {
                        position_error(input, reader.buffer_position(), err.to_string())
                    })?;
                    top.push_str(&decoded);
                }
            }
            Ok(Event::CData(e)) => {
                if let Some(top) = text.last_mut() {
                    let decoded = e.decode().map_err(|err| {
                        position_error(input, reader.buffer_position(), err.to_string())
                    })?;
                    top.push_str(&decoded);
                }
            }
            Ok(Event::GeneralRef(e)) => {
                if let Some(top) = text.last_mut() {
                    let name = e.decode().map_err(|err| {
                        position_error(input, reader.buffer_position(), err.to_string())
                    })?;
                    let resolved = match name.as_ref() {
                        "amp" => '&',
                        "lt" => '<',
                        "gt" => '>',
                        "quot" => '"',
                        "apos" => '\'',
                        other => e
                            .resolve_char_ref()
                            .ok()
                            .flatten()
                            .ok_or_else(|| {
                                position_error(
                                    input,
                                    reader.buffer_position(),
                                    format!("unknown entity reference &{other};"),
                                )
                            })?,
                    };
                    top.push(resolved);
                }
            }
            Ok(Event::End(_)) => {
                let content = text.pop().unwrap_or_default().trim().to_string();
                let full: Vec<&str> = path.iter().map(String::as_str).collect();
                match full.as_slice() {
                    ["clinical_study", "nct_id"] => {
                        doc.nct_id = content;
                        saw_nct = true;
                    }
                    ["clinical_study", "brief_title"] => doc.brief_title = content,
                    ["clinical_study", "condition"] => doc.conditions.push(content),
                    ["clinical_study", "intervention", "type"] => intervention.0 = content,
                    ["clinical_study", "intervention", "name"] => intervention.1 = content,
                    ["clinical_study", "intervention"] => {
                        doc.interventions.push(std::mem::take(&mut intervention))
                    }
                    ["clinical_study", "location", "facility"] => location.0 = content,
                    ["clinical_study", "location", "city"] => location.1 = content,
                    ["clinical_study", "location", "country"] => location.2 = content,
                    ["clinical_study", "location"] => {
                        doc.locations.push(std::mem::take(&mut location))
                    }
                    ["clinical_study", "reference", "pmid"] => reference.0 = content,
                    ["clinical_study", "reference", "citation"] => reference.1 = content,
                    ["clinical_study", "reference"] => {
                        doc.references.push(std::mem::take(&mut reference))
                    }
                    ["clinical_study", "criteria"] => doc.criteria = content,
                    ["clinical_study", "collaborator"] => doc.collaborators.push(content),
                    ["clinical_study", "overall_official"] => {
                        doc.overall_official = Some(content)
                    }
                    ["clinical_study", "primary_outcome"] => {
                        doc.primary_outcomes.push(content)
                    }
                    _ => {}
                }
                path.pop();
            }
            Ok(Event::Eof) => break,
            Ok(_) => {}
            Err(err) => {
                return Err(position_error(
                    input,
                    reader.error_position(),
                    err.to_string(),
                ))
            }
        }
        buf.clear();
    }

    if !saw_nct || doc.nct_id.is_empty() {
        return Err(Error::Schema {
            path: None,
            element: "nct_id".to_string(),
        });
    }
    Ok(doc)
}

fn position_error(input: &[u8], offset: u64, message: String) -> Error {
    let offset = (offset as usize).min(input.len());
    let line = input[..offset].iter().filter(|&&b| b == b'\n').count() as u64 + 1;
    let column = input[..offset]
        .iter()
        .rev()
        .take_while(|&&b| b != b'\n')
        .count() as u64
        + 1;
    Error::Parse {
        path: None,
        line,
        column,
        message,
    }
}

/// Parse one trial file, attaching the path to any error.
pub fn parse_trial_file(path: impl AsRef<Path>) -> Result<TrialDocument> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_trial_xml(&bytes).map_err(|e| e.with_path(path))
}

/// The `.xml` files of a directory, sorted by file name.
pub fn list_trial_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "xml") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Parse every `.xml` file under `dir`.
pub fn load_trials_dir(dir: impl AsRef<Path>) -> Result<Vec<TrialDocument>> {
    list_trial_files(dir)?
        .into_iter()
        .map(parse_trial_file)
        .collect()
}

/// An edge from a trial to a referenced entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphEdge {
    pub trial_id: String,
    pub relation: EntityType,
    pub entity_id: String,
}

/// The normalized entity graph: one deduplicated entity set per type plus
/// trial-to-entity edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityGraph {
    sets: BTreeMap<EntityType, EntitySet>,
    edges: Vec<GraphEdge>,
}

impl EntityGraph {
    pub fn set(&self, ty: EntityType) -> &EntitySet {
        &self.sets[&ty]
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn entity_count(&self) -> usize {
        self.sets.values().map(EntitySet::len).sum()
    }
}

/// Per-mention record collected before deduplication.
struct Pending {
    raws: BTreeSet<String>,
    trials: BTreeSet<String>,
}

/// Build the deduplicated graph from parsed documents.
///
/// Entities are merged per type on the normalized match field; the surviving
/// label is the lexicographically least raw variant, `occurrences` is the
/// number of distinct referencing trials, and record ids are derived from the
/// normalized field (slugged, truncated, suffixed on collision) in sorted
/// order so the result does not depend on input order. Trials themselves are
/// keyed by `nct_id` and never merged.
pub fn build_entity_graph(trials: &[TrialDocument]) -> Result<EntityGraph> {
    let mut seen_ids = BTreeSet::new();
    for t in trials {
        if !seen_ids.insert(t.nct_id.as_str()) {
            return Err(Error::DuplicateKey(format!(
                "duplicate nct_id {:?}",
                t.nct_id
            )));
        }
    }

    let mut sorted: Vec<&TrialDocument> = trials.iter().collect();
    sorted.sort_by(|a, b| a.nct_id.cmp(&b.nct_id));

    let mut pending: BTreeMap<EntityType, BTreeMap<String, Pending>> = BTreeMap::new();
    for ty in EntityType::ALL {
        pending.insert(ty, BTreeMap::new());
    }

    let mention =
        |ty: EntityType, raw: &str, trial: &str, map: &mut BTreeMap<EntityType, BTreeMap<String, Pending>>| {
            let norm = normalize(raw);
            if norm.is_empty() {
                return;
            }
            let slot = map
                .get_mut(&ty)
                .unwrap()
                .entry(norm)
                .or_insert_with(|| Pending {
                    raws: BTreeSet::new(),
                    trials: BTreeSet::new(),
                });
            slot.raws.insert(raw.trim().to_string());
            slot.trials.insert(trial.to_string());
        };

    for doc in &sorted {
        let id = doc.nct_id.as_str();
        for c in &doc.conditions {
            mention(EntityType::Condition, c, id, &mut pending);
        }
        for (_, name) in &doc.interventions {
            mention(EntityType::Intervention, name, id, &mut pending);
        }
        for (facility, city, country) in &doc.locations {
            let label: Vec<&str> = [facility.as_str(), city.as_str(), country.as_str()]
                .into_iter()
                .filter(|s| !s.trim().is_empty())
                .collect();
            if !label.is_empty() {
                mention(EntityType::Location, &label.join(", "), id, &mut pending);
            }
        }
        for c in &doc.collaborators {
            mention(EntityType::CollaboratorAgency, c, id, &mut pending);
        }
        if let Some(o) = &doc.overall_official {
            mention(EntityType::OverallOfficial, o, id, &mut pending);
        }
        for p in &doc.primary_outcomes {
            mention(EntityType::PrimaryOutcome, p, id, &mut pending);
        }
        for (pmid, citation) in &doc.references {
            let field = if citation.trim().is_empty() { pmid } else { citation };
            mention(EntityType::Reference, field, id, &mut pending);
        }
        mention(EntityType::Criteria, &doc.criteria, id, &mut pending);
    }

    let mut sets = BTreeMap::new();
    let trial_records: Vec<EntityRecord> = sorted
        .iter()
        .map(|t| EntityRecord::new(t.nct_id.clone(), t.brief_title.clone(), 1))
        .collect();
    sets.insert(
        EntityType::Trial,
        EntitySet::new("trial", EntityType::Trial.key(), trial_records)?,
    );

    let mut edges = Vec::new();
    for ty in EntityType::ALL.into_iter().skip(1) {
        let group = &pending[&ty];
        let mut used_ids: BTreeSet<String> = BTreeSet::new();
        let mut records = Vec::with_capacity(group.len());
        for (norm, slot) in group {
            let id = assign_id(norm, &mut used_ids);
            let label = slot.raws.iter().next().cloned().unwrap_or_default();
            records.push(EntityRecord::new(
                id.clone(),
                label,
                slot.trials.len() as u64,
            ));
            for trial in &slot.trials {
                edges.push(GraphEdge {
                    trial_id: trial.clone(),
                    relation: ty,
                    entity_id: id.clone(),
                });
            }
        }
        sets.insert(ty, EntitySet::new(ty.key(), ty.key(), records)?);
    }
    edges.sort();

    Ok(EntityGraph { sets, edges })
}

const MAX_ID_CHARS: usize = 64;

fn assign_id(norm: &str, used: &mut BTreeSet<String>) -> String {
    let base: String = slug(norm).chars().take(MAX_ID_CHARS).collect();
    let base = if base.is_empty() { "x".to_string() } else { base };
    if used.insert(base.clone()) {
        return base;
    }
    for n in 2.. {
        let candidate = format!("{base}_{n}");
        if used.insert(candidate.clone()) {
            return candidate;
        }
    }
    unreachable!()
}

/// Emit the RDF view of the graph: per entity one `rdf:type` and one
/// `rdfs:label` triple, per edge one triple with a `<base>/property/...`
/// predicate, and per trial one `foaf:page` link to its registry page.
pub fn triplify(graph: &EntityGraph, base: &str) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    for ty in EntityType::ALL {
        let class_uri = mint_uri(base, "class", ty.key())?;
        for record in graph.set(ty).records() {
            let entity = mint_uri(base, ty.key(), &record.id)?;
            triples.push(Triple::uri(
                entity.clone(),
                Uri::new(vocab::RDF_TYPE)?,
                class_uri.clone(),
            ));
            triples.push(Triple::literal(
                entity,
                Uri::new(vocab::RDFS_LABEL)?,
                record.match_field.clone(),
            ));
        }
    }
    for edge in graph.edges() {
        triples.push(Triple::uri(
            mint_uri(base, EntityType::Trial.key(), &edge.trial_id)?,
            mint_uri(base, "property", edge.relation.key())?,
            mint_uri(base, edge.relation.key(), &edge.entity_id)?,
        ));
    }
    for trial in graph.set(EntityType::Trial).records() {
        triples.push(Triple::uri(
            mint_uri(base, EntityType::Trial.key(), &trial.id)?,
            Uri::new(vocab::FOAF_PAGE)?,
            Uri::new(format!("https://clinicaltrials.gov/show/{}", trial.id))?,
        ));
    }
    Ok(triples)
}

/// Entity counts per type, in reporting order, plus the total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityStats {
    pub rows: Vec<(EntityType, usize)>,
    pub total: usize,
}

pub fn entity_stats(graph: &EntityGraph) -> EntityStats {
    let rows: Vec<(EntityType, usize)> = EntityType::ALL
        .into_iter()
        .map(|ty| (ty, graph.set(ty).len()))
        .collect();
    let total = rows.iter().map(|(_, n)| n).sum();
    EntityStats { rows, total }
}
