//! Seed papers for a query and the compulsory terminal set derived from them.
//!
//! Seeds come from a [`SeedProvider`] (a search engine or a frozen file). The
//! terminals are then reallocated towards papers that several seeds cite: a
//! paper referenced by many topic papers is likely prerequisite reading.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CitationGraph;
use crate::ids::PaperId;

pub const DEFAULT_K_SEEDS: usize = 30;
pub const DEFAULT_COOCCURRENCE_THRESHOLD: usize = 2;

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("no seeds found for query {0:?}")]
    NoSeeds(String),
    #[error("invalid query: {0}")]
    InvalidQuery(&'static str),
    #[error("seed provider failed: {0}")]
    Provider(String),
    #[error("cannot read seed file {path}: {message}")]
    File { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub key_phrases: Vec<String>,
    pub k_seeds: usize,
    pub cutoff_year: Option<i32>,
    pub k_output: usize,
    /// Papers that must never be returned, e.g. the survey being evaluated.
    #[serde(default)]
    pub exclude: Vec<PaperId>,
}

impl QuerySpec {
    pub fn new(phrases: impl IntoIterator<Item = impl Into<String>>) -> Self {
        QuerySpec {
            key_phrases: phrases.into_iter().map(Into::into).collect(),
            k_seeds: DEFAULT_K_SEEDS,
            cutoff_year: None,
            k_output: DEFAULT_K_SEEDS,
            exclude: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SeedError> {
        if self.key_phrases.is_empty() || self.key_phrases.iter().all(|p| p.trim().is_empty()) {
            return Err(SeedError::InvalidQuery("key phrases are empty"));
        }
        if self.k_seeds == 0 {
            return Err(SeedError::InvalidQuery("k_seeds must be positive"));
        }
        if self.k_output == 0 {
            return Err(SeedError::InvalidQuery("k_output must be positive"));
        }
        Ok(())
    }

    /// The string handed to search engines: trimmed phrases joined by `", "`.
    pub fn query_string(&self) -> String {
        self.key_phrases
            .iter()
            .map(|p| p.trim())
            .filter(|p| !p.is_empty())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Source of candidate seed ids for a query, best first.
pub trait SeedProvider: Send + Sync {
    fn candidates(&self, query: &QuerySpec) -> Result<Vec<String>, SeedError>;
}

/// Frozen query -> ranked ids map, keyed by [`QuerySpec::query_string`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OfflineSeedProvider {
    entries: BTreeMap<String, Vec<String>>,
}

impl OfflineSeedProvider {
    pub fn new(entries: BTreeMap<String, Vec<String>>) -> Self {
        OfflineSeedProvider { entries }
    }

    pub fn from_file(path: &Path) -> Result<Self, SeedError> {
        let err = |message: String| SeedError::File {
            path: path.display().to_string(),
            message,
        };
        let file = File::open(path).map_err(|e| err(e.to_string()))?;
        serde_json::from_reader(BufReader::new(file)).map_err(|e| err(e.to_string()))
    }

    pub fn insert(&mut self, query: impl Into<String>, ids: Vec<String>) {
        self.entries.insert(query.into(), ids);
    }
}

impl SeedProvider for OfflineSeedProvider {
    fn candidates(&self, query: &QuerySpec) -> Result<Vec<String>, SeedError> {
        Ok(self.entries.get(&query.query_string()).cloned().unwrap_or_default())
    }
}

/// Ranked seed papers that resolve in the corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSet {
    pub ids: Vec<PaperId>,
    pub dropped_unresolvable: usize,
    pub dropped_after_cutoff: usize,
    pub dropped_excluded: usize,
}

impl SeedSet {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Resolves provider hits against the corpus. Duplicates, unknown ids, papers
/// after the cutoff year and excluded ids are dropped; at most `k_seeds`
/// survive in provider order.
pub fn provide_seeds(
    provider: &dyn SeedProvider,
    graph: &CitationGraph,
    query: &QuerySpec,
) -> Result<SeedSet, SeedError> {
    query.validate()?;
    let seeds = resolve_seeds(provider.candidates(query)?, graph, query);
    if seeds.is_empty() {
        return Err(SeedError::NoSeeds(query.query_string()));
    }
    Ok(seeds)
}

fn resolve_seeds(raw: Vec<String>, graph: &CitationGraph, query: &QuerySpec) -> SeedSet {
    let mut out = SeedSet::default();
    let mut seen = BTreeSet::new();
    for id in raw {
        if out.ids.len() == query.k_seeds {
            break;
        }
        if !seen.insert(id.clone()) {
            continue;
        }
        let Some(paper) = graph.get(&id) else {
            out.dropped_unresolvable += 1;
            continue;
        };
        if query.exclude.iter().any(|e| e.as_str() == id) {
            out.dropped_excluded += 1;
            continue;
        }
        if query.cutoff_year.is_some_and(|c| paper.year > c) {
            out.dropped_after_cutoff += 1;
            continue;
        }
        out.ids.push(paper.id.clone());
    }
    out
}

/// For every paper cited by a seed, the number of distinct seeds citing it.
/// Seeds cited by other seeds are counted too, so a seed can itself be
/// reallocated and the INTERSECTION mode is not empty by construction.
pub fn cooccurrence_counts(subgraph: &CitationGraph, seeds: &[PaperId]) -> BTreeMap<PaperId, usize> {
    let seed_set: BTreeSet<&PaperId> = seeds.iter().collect();
    let mut counts = BTreeMap::new();
    for seed in &seed_set {
        for c in subgraph.references(seed.as_str()) {
            *counts.entry(c.id.clone()).or_insert(0) += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TerminalMode {
    /// Papers co-cited by at least `threshold` seeds.
    #[default]
    Reallocated,
    /// The seeds themselves.
    Initial,
    Union,
    Intersection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalSet {
    pub ids: BTreeSet<PaperId>,
    pub mode: TerminalMode,
    /// Set when the requested set was empty and the seeds were used instead.
    pub fell_back: bool,
}

impl TerminalSet {
    pub fn to_vec(&self) -> Vec<PaperId> {
        self.ids.iter().cloned().collect()
    }
}

/// Papers co-cited by at least `threshold` seeds.
pub fn reallocated(counts: &BTreeMap<PaperId, usize>, threshold: usize) -> BTreeSet<PaperId> {
    counts
        .iter()
        .filter(|(_, c)| **c >= threshold)
        .map(|(id, _)| id.clone())
        .collect()
}

/// Compulsory terminals for the chosen mode. Seeds outside `subgraph` are
/// ignored; an empty REALLOCATED or INTERSECTION set falls back to the seeds.
pub fn reallocate_terminals(
    subgraph: &CitationGraph,
    seeds: &[PaperId],
    threshold: usize,
    mode: TerminalMode,
) -> TerminalSet {
    let initial: BTreeSet<PaperId> = seeds
        .iter()
        .filter(|s| subgraph.contains(s.as_str()))
        .cloned()
        .collect();
    let counts = cooccurrence_counts(subgraph, seeds);
    let realloc = reallocated(&counts, threshold.max(1));
    let chosen = match mode {
        TerminalMode::Initial => initial.clone(),
        TerminalMode::Reallocated => realloc,
        TerminalMode::Union => realloc.union(&initial).cloned().collect(),
        TerminalMode::Intersection => realloc.intersection(&initial).cloned().collect(),
    };
    if chosen.is_empty() {
        TerminalSet {
            ids: initial,
            mode,
            fell_back: mode != TerminalMode::Initial,
        }
    } else {
        TerminalSet {
            ids: chosen,
            mode,
            fell_back: false,
        }
    }
}
