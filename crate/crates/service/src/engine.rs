//! Loaded corpus plus seed provider; answers queries with a [`QueryResult`].

use std::collections::BTreeSet;
use std::sync::Arc;

use anyhow::Context;
use readpath::corpus::{load_papers, load_venues, CitationGraph, VenueTable};
use readpath::pathgen::{PathEdge, ReadingOrder};
use readpath::pipeline::{run_query, PipelineConfig, PipelineError, PipelineRun, ScoredCorpus};
use readpath::seeding::{QuerySpec, SeedProvider};
use readpath::PaperId;
use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::provider::build_provider;

/// Query body: `phrases` may be a single string or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRequest {
    pub phrases: Phrases,
    #[serde(default)]
    pub k_seeds: Option<usize>,
    #[serde(default)]
    pub k_output: Option<usize>,
    #[serde(default)]
    pub cutoff_year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Phrases {
    One(String),
    Many(Vec<String>),
}

impl Phrases {
    pub fn into_vec(self) -> Vec<String> {
        match self {
            Phrases::One(s) => vec![s],
            Phrases::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeView {
    pub id: PaperId,
    pub title: String,
    pub authors: Vec<String>,
    pub year: i32,
    pub venue: Option<String>,
    /// Combined importance `a * pgscore + b * venue`.
    pub weight: f64,
    pub pgscore: f64,
    pub seed: bool,
    pub terminal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryTiming {
    /// Size of the weighted graph handed to the Steiner solver.
    pub nodes: usize,
    pub edges: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub query: String,
    pub nodes: Vec<NodeView>,
    /// Directed from prerequisite to dependent paper.
    pub edges: Vec<PathEdge>,
    pub roots: Vec<PaperId>,
    pub order: ReadingOrder,
    /// Top-K list: tree papers by weight, padded from the rest of the subgraph.
    pub ranked: Vec<PaperId>,
    pub seeds: Vec<PaperId>,
    pub terminals: Vec<PaperId>,
    pub timing: QueryTiming,
}

pub struct Engine {
    pub corpus: ScoredCorpus,
    pub provider: Arc<dyn SeedProvider>,
    pub pipeline: PipelineConfig,
}

impl Engine {
    pub fn new(
        graph: CitationGraph,
        venues: &VenueTable,
        provider: Arc<dyn SeedProvider>,
        pipeline: PipelineConfig,
    ) -> Result<Self, PipelineError> {
        pipeline.validate()?;
        let corpus = ScoredCorpus::new(graph, venues, &pipeline.params)?;
        Ok(Engine {
            corpus,
            provider,
            pipeline,
        })
    }

    pub fn from_config(config: &EngineConfig) -> anyhow::Result<Self> {
        let (graph, report) = load_papers(&config.papers_path)?;
        tracing::info!(papers = report.papers, edges = report.edges, dangling = report.dangling, "corpus loaded");
        let venues = match &config.venues_path {
            Some(p) => load_venues(p)?,
            None => VenueTable::default(),
        };
        let provider = build_provider(&config.seed_provider)?;
        Engine::new(graph, &venues, provider, config.pipeline.clone()).context("scoring corpus")
    }

    pub fn query_spec(&self, request: QueryRequest) -> QuerySpec {
        let mut spec = QuerySpec::new(request.phrases.into_vec());
        spec.k_seeds = request.k_seeds.unwrap_or(self.pipeline.k_seeds);
        spec.k_output = request.k_output.unwrap_or(self.pipeline.k_output);
        spec.cutoff_year = request.cutoff_year;
        spec
    }

    pub fn query(&self, request: QueryRequest) -> Result<QueryResult, PipelineError> {
        let spec = self.query_spec(request);
        let run = run_query(&self.corpus, self.provider.as_ref(), &spec, &self.pipeline)?;
        Ok(self.result(&spec, run))
    }

    fn result(&self, spec: &QuerySpec, run: PipelineRun) -> QueryResult {
        let seeds: BTreeSet<&PaperId> = run.seeds.ids.iter().collect();
        let terminals: Vec<PaperId> = run.terminals.as_ref().map(|t| t.to_vec()).unwrap_or_default();
        let terminal_set: BTreeSet<&PaperId> = terminals.iter().collect();
        let nodes = run
            .path
            .nodes
            .iter()
            .map(|n| {
                let paper = self.corpus.graph.get(n.id.as_str()).expect("path node is in the corpus");
                NodeView {
                    id: n.id.clone(),
                    title: paper.title.clone(),
                    authors: paper.authors.clone(),
                    year: paper.year,
                    venue: paper.venue.clone(),
                    weight: n.weight,
                    pgscore: self.corpus.scores.pgscore.get(&n.id).copied().unwrap_or(0.0),
                    seed: seeds.contains(&n.id),
                    terminal: terminal_set.contains(&n.id),
                }
            })
            .collect();
        QueryResult {
            query: spec.query_string(),
            nodes,
            edges: run.path.edges.clone(),
            roots: run.path.roots.clone(),
            order: run.order.clone(),
            ranked: run.ranked.clone(),
            seeds: run.seeds.ids.clone(),
            terminals,
            timing: QueryTiming {
                nodes: run.graph_nodes,
                edges: run.graph_edges,
                seconds: run.elapsed.as_secs_f64(),
            },
        }
    }
}
