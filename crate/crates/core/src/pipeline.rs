//! End-to-end query pipeline: seeds, neighborhood subgraph, terminal
//! reallocation, weighted graph, Steiner tree, reading path and ranking.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CitationGraph, CorpusError, Direction, VenueTable};
use crate::ids::PaperId;
use crate::pathgen::{orient, reading_order, top_k_list, PathError, ReadingOrder, ReadingPath};
use crate::scoring::{build_weighted_graph_with, NodeScores, ScoreParams, ScoringError, WeightOverride};
use crate::seeding::{
    provide_seeds, reallocate_terminals, QuerySpec, SeedError, SeedProvider, SeedSet, TerminalMode, TerminalSet,
    DEFAULT_COOCCURRENCE_THRESHOLD, DEFAULT_K_SEEDS,
};
use crate::steiner::{newst, SteinerError, SteinerTree};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Seeds(#[from] SeedError),
    #[error(transparent)]
    Steiner(#[from] SteinerError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("invalid pipeline config: {0}")]
    Config(&'static str),
}

/// Pipeline knobs shared by the CLI, the service and the evaluation harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub params: ScoreParams<f64>,
    pub cooccurrence_threshold: usize,
    pub neighborhood_order: u32,
    pub direction: Direction,
    pub terminal_mode: TerminalMode,
    pub k_seeds: usize,
    pub k_output: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            params: ScoreParams::default(),
            cooccurrence_threshold: DEFAULT_COOCCURRENCE_THRESHOLD,
            neighborhood_order: 2,
            direction: Direction::Out,
            terminal_mode: TerminalMode::Reallocated,
            k_seeds: DEFAULT_K_SEEDS,
            k_output: 30,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.params.validate()?;
        if !(1..=2).contains(&self.neighborhood_order) {
            return Err(PipelineError::Config("neighborhood_order must be 1 or 2"));
        }
        if self.cooccurrence_threshold == 0 {
            return Err(PipelineError::Config("cooccurrence_threshold must be positive"));
        }
        if self.k_seeds == 0 || self.k_output == 0 {
            return Err(PipelineError::Config("k_seeds and k_output must be positive"));
        }
        Ok(())
    }
}

/// How the final list is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// Steiner tree over the given terminals, optionally with a flattened
    /// cost term.
    Steiner {
        terminals: TerminalMode,
        weights: WeightOverride<f64>,
    },
    /// Reallocated terminals ranked by importance, no tree.
    CoCitedOnly,
    /// Every subgraph paper ranked by raw PageRank.
    PageRank,
    /// The seeds in provider order.
    SeedsOnly,
}

impl Variant {
    pub fn steiner(terminals: TerminalMode) -> Self {
        Variant::Steiner {
            terminals,
            weights: WeightOverride::default(),
        }
    }
}

/// Citation graph with importance scores computed once over the whole graph.
#[derive(Debug, Clone)]
pub struct ScoredCorpus {
    pub graph: CitationGraph,
    pub scores: NodeScores<f64>,
}

impl ScoredCorpus {
    pub fn new(graph: CitationGraph, venues: &VenueTable, params: &ScoreParams<f64>) -> Result<Self, ScoringError> {
        let scores = NodeScores::compute(&graph, venues, params)?;
        Ok(ScoredCorpus { graph, scores })
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub seeds: SeedSet,
    pub subgraph: CitationGraph,
    pub terminals: Option<TerminalSet>,
    pub tree: Option<SteinerTree<f64>>,
    pub path: ReadingPath,
    pub order: ReadingOrder,
    /// Ranked output, at most `k` long.
    pub ranked: Vec<PaperId>,
    /// Nodes and edges of the weighted graph handed to the solver (the
    /// neighborhood subgraph for baselines).
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub elapsed: Duration,
}

/// Runs steps 2-5 for already resolved seeds. Expansion never enters papers
/// published after `cutoff_year`.
pub fn run_with_seeds(
    corpus: &ScoredCorpus,
    seeds: SeedSet,
    config: &PipelineConfig,
    variant: Variant,
    cutoff_year: Option<i32>,
    k: usize,
) -> Result<PipelineRun, PipelineError> {
    let start = Instant::now();
    let subgraph = corpus.graph.neighborhood_where(
        &seeds.ids,
        config.neighborhood_order,
        config.direction,
        |p| cutoff_year.is_none_or(|c| p.year <= c),
    )?;
    let scores = corpus.scores.restrict(&subgraph);
    let mut run = PipelineRun {
        graph_nodes: subgraph.len(),
        graph_edges: subgraph.edge_count(),
        seeds,
        subgraph,
        terminals: None,
        tree: None,
        path: ReadingPath::default(),
        order: ReadingOrder::default(),
        ranked: Vec::new(),
        elapsed: Duration::ZERO,
    };
    match variant {
        Variant::SeedsOnly => {
            run.ranked = run.seeds.ids.iter().take(k).cloned().collect();
        }
        Variant::PageRank => {
            let mut ranked = scores.rank_by_pagerank(run.subgraph.ids());
            ranked.truncate(k);
            run.ranked = ranked;
        }
        Variant::CoCitedOnly => {
            let terminals = reallocate_terminals(
                &run.subgraph,
                &run.seeds.ids,
                config.cooccurrence_threshold,
                TerminalMode::Reallocated,
            );
            let mut ranked = scores.rank_by_combined(&terminals.ids);
            ranked.truncate(k);
            run.ranked = ranked;
            run.terminals = Some(terminals);
        }
        Variant::Steiner { terminals: mode, weights } => {
            let terminals =
                reallocate_terminals(&run.subgraph, &run.seeds.ids, config.cooccurrence_threshold, mode);
            let graph = build_weighted_graph_with(&run.subgraph, &scores, &config.params, weights)?;
            run.graph_nodes = graph.node_count();
            run.graph_edges = graph.edge_count();
            let tree = newst(&graph, &terminals.to_vec())?;
            let spares: Vec<PaperId> = run
                .subgraph
                .ids()
                .filter(|id| !tree.contains(id.as_str()))
                .cloned()
                .collect();
            let spares = scores.rank_by_combined(&spares);
            run.ranked = top_k_list(&tree, &scores, &spares, k);
            run.path = orient(&tree, &run.subgraph, &scores);
            run.order = reading_order(&run.path)?;
            run.terminals = Some(terminals);
            run.tree = Some(tree);
        }
    }
    run.elapsed = start.elapsed();
    Ok(run)
}

/// Full query: obtain seeds from `provider`, then [`run_with_seeds`] with the
/// configured terminal mode.
pub fn run_query(
    corpus: &ScoredCorpus,
    provider: &dyn SeedProvider,
    query: &QuerySpec,
    config: &PipelineConfig,
) -> Result<PipelineRun, PipelineError> {
    let start = Instant::now();
    let seeds = provide_seeds(provider, &corpus.graph, query)?;
    let mut run = run_with_seeds(
        corpus,
        seeds,
        config,
        Variant::steiner(config.terminal_mode),
        query.cutoff_year,
        query.k_output,
    )?;
    run.elapsed = start.elapsed();
    Ok(run)
}
