//! Immutable citation graph loaded from a line-delimited corpus file.
//!
//! Each line of the papers file is one JSON object:
//!
//! ```text
//! {"id": str, "title": str, "year": int, "venue": str|null, "authors": [str],
//!  "abstract": str|null, "citations": [{"id": str, "mentions": int}]}
//! ```
//!
//! The venues file is a single JSON object mapping venue key to a score in
//! `[0, 1]`. Citations to ids that are not in the file are dropped and
//! counted; self-citations are removed. A duplicated paper id is fatal.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::PaperId;

/// Earliest accepted year; also the sentinel for undated papers.
pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate paper id {id}")]
    DuplicateId { line: usize, id: PaperId },
    #[error("duplicate paper id {0}")]
    DuplicateRecord(PaperId),
    #[error("invalid venues file: {0}")]
    Venues(String),
    #[error("unknown paper id {0}")]
    UnknownPaper(PaperId),
    #[error("neighborhood order must be 1 or 2, got {0}")]
    InvalidOrder(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Citation {
    pub id: PaperId,
    pub mentions: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: PaperId,
    pub title: String,
    pub year: i32,
    pub venue: Option<String>,
    pub authors: Vec<String>,
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    pub citations: Vec<Citation>,
}

impl PaperRecord {
    /// Minimal record, mostly useful for building graphs in code.
    pub fn new(id: impl Into<PaperId>, year: i32) -> Self {
        let id = id.into();
        PaperRecord {
            title: id.to_string(),
            id,
            year,
            venue: None,
            authors: Vec::new(),
            abstract_text: None,
            citations: Vec::new(),
        }
    }

    pub fn cite(mut self, target: impl Into<PaperId>, mentions: u32) -> Self {
        self.citations.push(Citation {
            id: target.into(),
            mentions,
        });
        self
    }

    pub fn with_venue(mut self, venue: impl Into<String>) -> Self {
        self.venue = Some(venue.into());
        self
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCitation {
    id: String,
    mentions: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    title: String,
    year: Option<i64>,
    venue: Option<String>,
    authors: Vec<String>,
    #[serde(rename = "abstract")]
    abstract_text: Option<String>,
    citations: Vec<RawCitation>,
}

/// What happened while loading. Only duplicates abort a load; everything
/// here was repaired.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub papers: usize,
    pub edges: usize,
    /// Citations whose target is not in the corpus.
    pub dangling: usize,
    pub self_citations: usize,
    /// Repeated targets within one reference list, merged by summing mentions.
    pub merged_duplicate_citations: usize,
    /// Papers without a year, loaded with the 1900 sentinel.
    pub undated: Vec<PaperId>,
}

/// Directed citation graph. An edge `i -> j` means paper `i` cites paper `j`
/// with `mentions` occurrences in its text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CitationGraph {
    papers: BTreeMap<PaperId, PaperRecord>,
    cited_by: BTreeMap<PaperId, Vec<PaperId>>,
    edge_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Follow references only (citing -> cited).
    #[default]
    Out,
    /// Follow references and citing papers.
    Both,
}

impl CitationGraph {
    /// Builds a validated graph. Dangling targets and self-citations are
    /// dropped, repeated targets are merged; duplicate ids are an error.
    pub fn from_records(
        records: impl IntoIterator<Item = PaperRecord>,
    ) -> Result<(Self, LoadReport), CorpusError> {
        let mut papers = BTreeMap::new();
        for record in records {
            if papers.contains_key(&record.id) {
                return Err(CorpusError::DuplicateRecord(record.id));
            }
            papers.insert(record.id.clone(), record);
        }
        let mut report = LoadReport::default();
        let known: BTreeSet<PaperId> = papers.keys().cloned().collect();
        for record in papers.values_mut() {
            let mut merged: BTreeMap<PaperId, u32> = BTreeMap::new();
            for c in record.citations.drain(..) {
                if c.id == record.id {
                    report.self_citations += 1;
                } else if !known.contains(&c.id) {
                    report.dangling += 1;
                } else {
                    let slot = merged.entry(c.id).or_insert(0);
                    if *slot > 0 {
                        report.merged_duplicate_citations += 1;
                    }
                    *slot = slot.saturating_add(c.mentions.max(1));
                }
            }
            record.citations = merged
                .into_iter()
                .map(|(id, mentions)| Citation { id, mentions })
                .collect();
        }
        let graph = Self::assemble(papers);
        report.papers = graph.len();
        report.edges = graph.edge_count;
        Ok((graph, report))
    }

    /// Builds the reverse index for an already-clean paper map.
    fn assemble(papers: BTreeMap<PaperId, PaperRecord>) -> Self {
        let mut cited_by: BTreeMap<PaperId, Vec<PaperId>> =
            papers.keys().map(|k| (k.clone(), Vec::new())).collect();
        let mut edge_count = 0;
        for record in papers.values() {
            for c in &record.citations {
                cited_by
                    .get_mut(&c.id)
                    .expect("citation target resolved")
                    .push(record.id.clone());
                edge_count += 1;
            }
        }
        // Papers are visited in id order, so every list is already sorted.
        CitationGraph {
            papers,
            cited_by,
            edge_count,
        }
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, id: &str) -> bool {
        self.papers.contains_key(id)
    }

    pub fn get(&self, id: &str) -> Option<&PaperRecord> {
        self.papers.get(id)
    }

    pub fn year(&self, id: &str) -> Option<i32> {
        self.papers.get(id).map(|p| p.year)
    }

    /// Papers in id order.
    pub fn papers(&self) -> impl Iterator<Item = &PaperRecord> {
        self.papers.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &PaperId> {
        self.papers.keys()
    }

    /// Reference list of `id` (papers it cites), in target id order.
    pub fn references(&self, id: &str) -> &[Citation] {
        self.papers
            .get(id)
            .map(|p| p.citations.as_slice())
            .unwrap_or(&[])
    }

    /// Papers citing `id`, in id order.
    pub fn cited_by(&self, id: &str) -> &[PaperId] {
        self.cited_by.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Mentions of `target` inside `source`, if `source` cites it.
    pub fn mentions(&self, source: &str, target: &str) -> Option<u32> {
        let refs = self.references(source);
        refs.binary_search_by(|c| c.id.as_str().cmp(target))
            .ok()
            .map(|i| refs[i].mentions)
    }

    /// Every directed edge `(citing, cited, mentions)` in source id order.
    pub fn edges(&self) -> impl Iterator<Item = (&PaperId, &PaperId, u32)> {
        self.papers
            .values()
            .flat_map(|p| p.citations.iter().map(move |c| (&p.id, &c.id, c.mentions)))
    }

    /// Subgraph induced by `keep`; ids outside the graph are ignored.
    pub fn induced(&self, keep: &BTreeSet<PaperId>) -> CitationGraph {
        let papers = self
            .papers
            .iter()
            .filter(|(id, _)| keep.contains(*id))
            .map(|(id, p)| {
                let mut p = p.clone();
                p.citations.retain(|c| keep.contains(&c.id));
                (id.clone(), p)
            })
            .collect();
        Self::assemble(papers)
    }

    /// Keeps papers published in or before `cutoff_year`.
    pub fn filter_by_year(&self, cutoff_year: i32) -> CitationGraph {
        let keep = self
            .papers
            .values()
            .filter(|p| p.year <= cutoff_year)
            .map(|p| p.id.clone())
            .collect();
        self.induced(&keep)
    }

    /// Graph with the given papers removed.
    pub fn without(&self, remove: &[PaperId]) -> CitationGraph {
        let keep = self
            .papers
            .keys()
            .filter(|id| !remove.contains(id))
            .cloned()
            .collect();
        self.induced(&keep)
    }

    /// Subgraph induced by the seeds and everything within `order` hops.
    pub fn neighborhood(
        &self,
        seeds: &[PaperId],
        order: u32,
        direction: Direction,
    ) -> Result<CitationGraph, CorpusError> {
        self.neighborhood_where(seeds, order, direction, |_| true)
    }

    /// Like [`CitationGraph::neighborhood`], but expansion only enters papers
    /// accepted by `admit`, as if the rest were not in the graph. Seeds are
    /// always included.
    pub fn neighborhood_where(
        &self,
        seeds: &[PaperId],
        order: u32,
        direction: Direction,
        admit: impl Fn(&PaperRecord) -> bool,
    ) -> Result<CitationGraph, CorpusError> {
        if !(1..=2).contains(&order) {
            return Err(CorpusError::InvalidOrder(order));
        }
        let mut reached: BTreeSet<PaperId> = BTreeSet::new();
        for s in seeds {
            if !self.contains(s.as_str()) {
                return Err(CorpusError::UnknownPaper(s.clone()));
            }
            reached.insert(s.clone());
        }
        let mut frontier: Vec<PaperId> = reached.iter().cloned().collect();
        for _ in 0..order {
            let mut next = Vec::new();
            for id in &frontier {
                let outs = self.references(id.as_str()).iter().map(|c| &c.id);
                let ins = match direction {
                    Direction::Out => [].iter(),
                    Direction::Both => self.cited_by(id.as_str()).iter(),
                };
                for n in outs.chain(ins) {
                    if reached.contains(n) || !admit(&self.papers[n]) {
                        continue;
                    }
                    if reached.insert(n.clone()) {
                        next.push(n.clone());
                    }
                }
            }
            frontier = next;
        }
        Ok(self.induced(&reached))
    }
}

/// Ids from `ids` whose paper exists and was published in or before `cutoff_year`.
pub fn filter_ids_by_year(graph: &CitationGraph, ids: &[PaperId], cutoff_year: i32) -> Vec<PaperId> {
    ids.iter()
        .filter(|id| graph.year(id.as_str()).is_some_and(|y| y <= cutoff_year))
        .cloned()
        .collect()
}

/// Venue key -> score in `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VenueTable(BTreeMap<String, f64>);

impl VenueTable {
    pub fn new(scores: BTreeMap<String, f64>) -> Result<Self, CorpusError> {
        for (k, v) in &scores {
            if !(0.0..=1.0).contains(v) {
                return Err(CorpusError::Venues(format!("score for {k:?} is {v}, not in [0,1]")));
            }
        }
        Ok(VenueTable(scores))
    }

    pub fn score(&self, venue: &str) -> Option<f64> {
        self.0.get(venue).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_reader(reader: impl Read) -> Result<Self, CorpusError> {
        let map: BTreeMap<String, f64> =
            serde_json::from_reader(reader).map_err(|e| CorpusError::Venues(e.to_string()))?;
        Self::new(map)
    }
}

/// Parses a papers JSONL stream. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn parse_papers(reader: impl BufRead) -> Result<(CitationGraph, LoadReport), CorpusError> {
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    let mut undated = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let undated_year = raw.year.is_none();
        let record = validate(raw, line_no)?;
        if !seen.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId {
                line: line_no,
                id: record.id,
            });
        }
        if undated_year {
            undated.insert(record.id.clone());
        }
        records.push(record);
    }
    let (graph, mut report) = CitationGraph::from_records(records)?;
    report.undated = undated.into_iter().collect();
    Ok((graph, report))
}

fn validate(raw: RawRecord, line: usize) -> Result<PaperRecord, CorpusError> {
    let bad = |message: String| CorpusError::Malformed { line, message };
    if raw.id.is_empty() {
        return Err(bad("empty paper id".into()));
    }
    let year = match raw.year {
        None => MIN_YEAR,
        Some(y) if (MIN_YEAR as i64..=MAX_YEAR as i64).contains(&y) => y as i32,
        Some(y) => return Err(bad(format!("year {y} outside [{MIN_YEAR}, {MAX_YEAR}]"))),
    };
    let mut citations = Vec::with_capacity(raw.citations.len());
    for c in raw.citations {
        if c.id.is_empty() {
            return Err(bad("empty citation id".into()));
        }
        if c.mentions < 1 || c.mentions > u32::MAX as i64 {
            return Err(bad(format!("citation of {} has mentions {}", c.id, c.mentions)));
        }
        citations.push(Citation {
            id: PaperId::new(c.id),
            mentions: c.mentions as u32,
        });
    }
    Ok(PaperRecord {
        id: PaperId::new(raw.id),
        title: raw.title,
        year,
        venue: raw.venue,
        authors: raw.authors,
        abstract_text: raw.abstract_text,
        citations,
    })
}

/// A loaded corpus: graph, venue table and what the loader repaired.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub graph: CitationGraph,
    pub venues: VenueTable,
    pub report: LoadReport,
}

fn open(path: &Path) -> Result<File, CorpusError> {
    File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_papers(path: &Path) -> Result<(CitationGraph, LoadReport), CorpusError> {
    parse_papers(BufReader::new(open(path)?))
}

pub fn load_venues(path: &Path) -> Result<VenueTable, CorpusError> {
    VenueTable::from_reader(BufReader::new(open(path)?))
}

pub fn load_corpus(papers_path: &Path, venues_path: &Path) -> Result<LoadedCorpus, CorpusError> {
    let (graph, report) = load_papers(papers_path)?;
    let venues = load_venues(venues_path)?;
    Ok(LoadedCorpus {
        graph,
        venues,
        report,
    })
}

/// Writes records as papers JSONL, one object per line.
pub fn write_papers<'a>(
    mut out: impl std::io::Write,
    records: impl IntoIterator<Item = &'a PaperRecord>,
) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
