//! Benchmark harness: survey reference lists as ground truth, P@K / F1@K,
//! ablation variants and baselines.
//!
//! A benchmark file is JSONL, one survey per line:
//!
//! ```text
//! {"survey_id": str, "key_phrases": [str], "year": int, "citation_count": int,
//!  "references": [{"id": str, "occurrences": int}], "seeds": [str]}
//! ```
//!
//! `seeds` is the frozen search-engine answer for the survey's key phrases.
//! Every survey is evaluated against the corpus as of its publication year
//! with the survey itself removed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CitationGraph, VenueTable};
use crate::ids::PaperId;
use crate::pipeline::{run_with_seeds, PipelineConfig, PipelineError, ScoredCorpus, Variant};
use crate::scoring::WeightOverride;
use crate::seeding::{provide_seeds, OfflineSeedProvider, QuerySpec, SeedError, TerminalMode};

/// Reference year of the survey quality score.
pub const QUALITY_REFERENCE_YEAR: i32 = 2020;
/// Constant that replaces the dropped term in the NEWST_N / NEWST_E ablations.
pub const UNIFORM_ABLATION_WEIGHT: f64 = 1.0;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("survey year {0} is after {QUALITY_REFERENCE_YEAR}")]
    FutureYear(i32),
    #[error("cannot read benchmark {path}: {message}")]
    Io { path: String, message: String },
    #[error("benchmark line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("survey {survey}: {source}")]
    Pipeline {
        survey: PaperId,
        #[source]
        source: PipelineError,
    },
    #[error("survey {survey}: output contains {paper}, published after the survey")]
    Leakage { survey: PaperId, paper: PaperId },
    #[error("invalid evaluation config: {0}")]
    Config(String),
    #[error("cannot write report: {0}")]
    Write(String),
}

/// `citation / (2020 - year + 1)`.
pub fn survey_quality_score(citation_count: u64, year: i32) -> Result<f64, EvalError> {
    if year > QUALITY_REFERENCE_YEAR {
        return Err(EvalError::FutureYear(year));
    }
    Ok(citation_count as f64 / (QUALITY_REFERENCE_YEAR - year + 1) as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyReference {
    pub id: PaperId,
    pub occurrences: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyEntry {
    pub survey_id: PaperId,
    pub key_phrases: Vec<String>,
    pub year: i32,
    pub citation_count: u64,
    pub references: Vec<SurveyReference>,
    pub seeds: Vec<String>,
}

impl SurveyEntry {
    pub fn quality_score(&self) -> Result<f64, EvalError> {
        survey_quality_score(self.citation_count, self.year)
    }
}

pub fn parse_benchmark(reader: impl BufRead) -> Result<Vec<SurveyEntry>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let bad = |message: String| EvalError::Malformed { line: i + 1, message };
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: SurveyEntry = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        if let Some(r) = entry.references.iter().find(|r| r.occurrences == 0) {
            return Err(bad(format!("reference {} has zero occurrences", r.id)));
        }
        out.push(entry);
    }
    Ok(out)
}

pub fn load_benchmark(path: &Path) -> Result<Vec<SurveyEntry>, EvalError> {
    let file = File::open(path).map_err(|e| EvalError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_benchmark(BufReader::new(file))
}

/// Reference lists thresholded by in-survey occurrence: `L_i` holds papers
/// cited at least `i` times.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub l1: BTreeSet<PaperId>,
    pub l2: BTreeSet<PaperId>,
    pub l3: BTreeSet<PaperId>,
}

impl GroundTruth {
    pub fn level(&self, level: u8) -> &BTreeSet<PaperId> {
        match level {
            1 => &self.l1,
            2 => &self.l2,
            _ => &self.l3,
        }
    }

    /// Keeps only papers for which `keep` holds.
    pub fn retain(&mut self, keep: impl Fn(&PaperId) -> bool) {
        self.l1.retain(&keep);
        self.l2.retain(&keep);
        self.l3.retain(&keep);
    }
}

pub fn ground_truth(entry: &SurveyEntry) -> GroundTruth {
    let mut occ: BTreeMap<&PaperId, u32> = BTreeMap::new();
    for r in &entry.references {
        if r.id != entry.survey_id {
            *occ.entry(&r.id).or_default() += r.occurrences;
        }
    }
    let at_least = |n: u32| {
        occ.iter()
            .filter(|(_, c)| **c >= n)
            .map(|(id, _)| (*id).clone())
            .collect()
    };
    GroundTruth {
        l1: at_least(1),
        l2: at_least(2),
        l3: at_least(3),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Truth was empty; all metrics are 0 by definition.
    pub empty_truth: bool,
}

fn hits(predicted: &[PaperId], truth: &BTreeSet<PaperId>, k: usize) -> usize {
    let mut seen = BTreeSet::new();
    predicted
        .iter()
        .take(k)
        .filter(|p| truth.contains(*p) && seen.insert(*p))
        .count()
}

/// `|top-k ∩ truth| / k`. Panics if `k == 0`.
pub fn precision_at_k(predicted: &[PaperId], truth: &BTreeSet<PaperId>, k: usize) -> f64 {
    assert!(k >= 1, "k must be positive");
    hits(predicted, truth, k) as f64 / k as f64
}

/// `|top-k ∩ truth| / |truth|`, 0 for an empty truth.
pub fn recall_at_k(predicted: &[PaperId], truth: &BTreeSet<PaperId>, k: usize) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    hits(predicted, truth, k) as f64 / truth.len() as f64
}

pub fn f1_at_k(predicted: &[PaperId], truth: &BTreeSet<PaperId>, k: usize) -> f64 {
    metrics_at_k(predicted, truth, k).f1
}

pub fn metrics_at_k(predicted: &[PaperId], truth: &BTreeSet<PaperId>, k: usize) -> Metrics {
    if truth.is_empty() {
        return Metrics {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
            empty_truth: true,
        };
    }
    let precision = precision_at_k(predicted, truth, k);
    let recall = recall_at_k(predicted, truth, k);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Metrics {
        precision,
        recall,
        f1,
        empty_truth: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AblationMode {
    /// Reallocated (co-cited) papers as terminals.
    Newst,
    /// Initial seeds as terminals.
    NewstW,
    /// Union of the two terminal sets.
    NewstU,
    /// Intersection of the two terminal sets.
    NewstI,
    /// Reallocated papers as the final answer, no tree.
    NewstC,
    /// Uniform node weights.
    NewstN,
    /// Uniform edge costs.
    NewstE,
    /// Subgraph ranked by raw PageRank.
    PagerankBaseline,
    /// The seed list itself.
    SeedsOnly,
}

impl AblationMode {
    pub const ALL: [AblationMode; 9] = [
        AblationMode::Newst,
        AblationMode::NewstW,
        AblationMode::NewstU,
        AblationMode::NewstI,
        AblationMode::NewstC,
        AblationMode::NewstN,
        AblationMode::NewstE,
        AblationMode::PagerankBaseline,
        AblationMode::SeedsOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AblationMode::Newst => "NEWST",
            AblationMode::NewstW => "NEWST_W",
            AblationMode::NewstU => "NEWST_U",
            AblationMode::NewstI => "NEWST_I",
            AblationMode::NewstC => "NEWST_C",
            AblationMode::NewstN => "NEWST_N",
            AblationMode::NewstE => "NEWST_E",
            AblationMode::PagerankBaseline => "PAGERANK_BASELINE",
            AblationMode::SeedsOnly => "SEEDS_ONLY",
        }
    }

    pub fn variant(self, base: TerminalMode) -> Variant {
        let uniform = Some(UNIFORM_ABLATION_WEIGHT);
        match self {
            AblationMode::Newst => Variant::steiner(TerminalMode::Reallocated),
            AblationMode::NewstW => Variant::steiner(TerminalMode::Initial),
            AblationMode::NewstU => Variant::steiner(TerminalMode::Union),
            AblationMode::NewstI => Variant::steiner(TerminalMode::Intersection),
            AblationMode::NewstC => Variant::CoCitedOnly,
            AblationMode::NewstN => Variant::Steiner {
                terminals: base,
                weights: WeightOverride {
                    uniform_node_weight: uniform,
                    uniform_edge_cost: None,
                },
            },
            AblationMode::NewstE => Variant::Steiner {
                terminals: base,
                weights: WeightOverride {
                    uniform_node_weight: None,
                    uniform_edge_cost: uniform,
                },
            },
            AblationMode::PagerankBaseline => Variant::PageRank,
            AblationMode::SeedsOnly => Variant::SeedsOnly,
        }
    }
}

impl fmt::Display for AblationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AblationMode {
    type Err = String;

    /// Accepts `NEWST_W`, `NEWST-W` and any letter case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        let norm = if norm == "PAGERANK" { "PAGERANK_BASELINE".to_string() } else { norm };
        AblationMode::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| format!("unknown mode {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub pipeline: PipelineConfig,
    pub modes: Vec<AblationMode>,
    /// Cutoffs K at which lists are scored.
    pub ks: Vec<usize>,
    /// Ground-truth levels (1, 2, 3).
    pub levels: Vec<u8>,
    /// Seed counts to sweep; each truncates the survey's frozen seed list.
    pub seed_counts: Vec<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            pipeline: PipelineConfig::default(),
            modes: vec![AblationMode::Newst],
            ks: vec![20, 30, 40, 50],
            levels: vec![1],
            seed_counts: vec![30],
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |m: &str| Err(EvalError::Config(m.to_string()));
        if self.modes.is_empty() {
            return bad("no modes");
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return bad("K values must be positive");
        }
        if self.levels.is_empty() || self.levels.iter().any(|l| !(1..=3).contains(l)) {
            return bad("levels must be 1, 2 or 3");
        }
        if self.seed_counts.is_empty() || self.seed_counts.contains(&0) {
            return bad("seed counts must be positive");
        }
        Ok(())
    }
}

/// One scored list: survey x mode x seed count x K x level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub survey_id: PaperId,
    pub mode: AblationMode,
    pub seeds: usize,
    pub k: usize,
    pub level: u8,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub truth_size: usize,
    /// Ground-truth papers missing from the corpus as of the survey year.
    pub unresolvable: usize,
    pub empty_truth: bool,
}

/// Mean over surveys with a non-empty truth list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mode: AblationMode,
    pub seeds: usize,
    pub k: usize,
    pub level: u8,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub queries: usize,
}

/// Size of the graph the solver saw for one survey and mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSize {
    pub survey_id: PaperId,
    pub mode: AblationMode,
    pub seeds: usize,
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedSurvey {
    pub survey_id: PaperId,
    pub seeds: usize,
    pub reason: String,
}

/// Deterministic part of an evaluation; wall-clock times live in
/// [`EvalOutput::timings`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub aggregates: Vec<Aggregate>,
    pub runs: Vec<RunSize>,
    pub skipped: Vec<SkippedSurvey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub survey_id: PaperId,
    pub mode: AblationMode,
    pub seeds: usize,
    pub nodes: usize,
    pub edges: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct EvalOutput {
    pub report: EvalReport,
    pub timings: Vec<Timing>,
}

#[derive(Default)]
struct SurveyResult {
    rows: Vec<EvalRow>,
    runs: Vec<RunSize>,
    skipped: Vec<SkippedSurvey>,
    timings: Vec<(RunSize, Duration)>,
}

fn evaluate_survey(
    entry: &SurveyEntry,
    graph: &CitationGraph,
    venues: &VenueTable,
    config: &EvalConfig,
) -> Result<SurveyResult, EvalError> {
    let wrap = |source: PipelineError| EvalError::Pipeline {
        survey: entry.survey_id.clone(),
        source,
    };
    let mut out = SurveyResult::default();
    let visible = graph
        .filter_by_year(entry.year)
        .without(std::slice::from_ref(&entry.survey_id));
    if visible.is_empty() {
        for &n in &config.seed_counts {
            out.skipped.push(SkippedSurvey {
                survey_id: entry.survey_id.clone(),
                seeds: n,
                reason: "corpus is empty before the survey year".into(),
            });
        }
        return Ok(out);
    }
    let corpus = ScoredCorpus::new(visible, venues, &config.pipeline.params).map_err(|e| wrap(e.into()))?;

    let full_truth = ground_truth(entry);
    let mut truth = full_truth.clone();
    truth.retain(|id| corpus.graph.contains(id.as_str()));
    let unresolvable = |level: u8| full_truth.level(level).len() - truth.level(level).len();

    let mut query = QuerySpec::new(entry.key_phrases.iter().cloned());
    query.cutoff_year = Some(entry.year);
    query.exclude = vec![entry.survey_id.clone()];
    let mut provider = OfflineSeedProvider::default();
    provider.insert(query.query_string(), entry.seeds.clone());
    let k_max = config.ks.iter().copied().max().unwrap_or(1);

    for &n_seeds in &config.seed_counts {
        query.k_seeds = n_seeds;
        let seeds = match provide_seeds(&provider, &corpus.graph, &query) {
            Ok(s) => s,
            Err(e @ SeedError::NoSeeds(_)) => {
                out.skipped.push(SkippedSurvey {
                    survey_id: entry.survey_id.clone(),
                    seeds: n_seeds,
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(wrap(e.into())),
        };
        for &mode in &config.modes {
            let variant = mode.variant(config.pipeline.terminal_mode);
            let run = run_with_seeds(&corpus, seeds.clone(), &config.pipeline, variant, Some(entry.year), k_max)
                .map_err(wrap)?;
            if let Some(p) = run
                .ranked
                .iter()
                .find(|p| corpus.graph.year(p.as_str()).is_none_or(|y| y > entry.year))
            {
                return Err(EvalError::Leakage {
                    survey: entry.survey_id.clone(),
                    paper: p.clone(),
                });
            }
            for &k in &config.ks {
                for &level in &config.levels {
                    let m = metrics_at_k(&run.ranked, truth.level(level), k);
                    out.rows.push(EvalRow {
                        survey_id: entry.survey_id.clone(),
                        mode,
                        seeds: n_seeds,
                        k,
                        level,
                        precision: m.precision,
                        recall: m.recall,
                        f1: m.f1,
                        truth_size: truth.level(level).len(),
                        unresolvable: unresolvable(level),
                        empty_truth: m.empty_truth,
                    });
                }
            }
            let size = RunSize {
                survey_id: entry.survey_id.clone(),
                mode,
                seeds: n_seeds,
                nodes: run.graph_nodes,
                edges: run.graph_edges,
            };
            out.timings.push((size.clone(), run.elapsed));
            out.runs.push(size);
        }
    }
    Ok(out)
}

/// Evaluates every survey (in parallel) and aggregates per
/// (mode, seeds, K, level). Output order follows the benchmark order, so the
/// report is identical across runs.
pub fn run_eval(
    entries: &[SurveyEntry],
    graph: &CitationGraph,
    venues: &VenueTable,
    config: &EvalConfig,
) -> Result<EvalOutput, EvalError> {
    config.validate()?;
    config
        .pipeline
        .params
        .validate()
        .map_err(|e| EvalError::Config(e.to_string()))?;
    let results: Vec<SurveyResult> = entries
        .par_iter()
        .map(|e| evaluate_survey(e, graph, venues, config))
        .collect::<Result<_, _>>()?;

    let mut output = EvalOutput::default();
    for r in results {
        output.report.rows.extend(r.rows);
        output.report.runs.extend(r.runs);
        output.report.skipped.extend(r.skipped);
        output.timings.extend(r.timings.into_iter().map(|(s, d)| Timing {
            survey_id: s.survey_id,
            mode: s.mode,
            seeds: s.seeds,
            nodes: s.nodes,
            edges: s.edges,
            seconds: d.as_secs_f64(),
        }));
    }
    output.report.aggregates = aggregate(&output.report.rows);
    Ok(output)
}

fn aggregate(rows: &[EvalRow]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(AblationMode, usize, usize, u8), Vec<&EvalRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| !r.empty_truth) {
        groups.entry((r.mode, r.seeds, r.k, r.level)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((mode, seeds, k, level), rs)| {
            let n = rs.len() as f64;
            let mean = |f: fn(&EvalRow) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            Aggregate {
                mode,
                seeds,
                k,
                level,
                precision: mean(|r| r.precision),
                recall: mean(|r| r.recall),
                f1: mean(|r| r.f1),
                queries: rs.len(),
            }
        })
        .collect()
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat CSV, one row per survey x mode x seeds x K x level.
    pub fn to_csv(&self) -> Result<String, EvalError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(|e| EvalError::Write(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| EvalError::Write(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| EvalError::Write(e.to_string()))
    }

    pub fn aggregate(&self, mode: AblationMode, seeds: usize, k: usize, level: u8) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.mode == mode && a.seeds == seeds && a.k == k && a.level == level)
    }
}

pub fn timings_csv(timings: &[Timing]) -> Result<String, EvalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for t in timings {
        w.serialize(t).map_err(|e| EvalError::Write(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| EvalError::Write(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| EvalError::Write(e.to_string()))
}
