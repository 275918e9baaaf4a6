//! Reading-path generation over a citation graph.
//!
//! Given a handful of seed papers for a research topic, the engine expands
//! their citation neighborhood, reallocates the compulsory papers by
//! co-citation, connects them with a node-edge weighted Steiner tree and
//! orients that tree into a prerequisite-first reading path. An evaluation
//! harness scores generated lists against survey reference lists.
//!
//! The numeric core ([`scoring`], [`steiner`]) is generic over the scalar
//! type. The aliases below fix it to `f64`, which is what the pipeline and
//! the service use; the Steiner solver also runs over exact rationals.

pub mod corpus;
pub mod evalbench;
pub mod ids;
pub mod pathgen;
pub mod pipeline;
pub mod scoring;
pub mod seeding;
pub mod steiner;
pub mod synth;

pub use corpus::{CitationGraph, CorpusError, Direction, LoadReport, PaperRecord, VenueTable};
pub use ids::PaperId;
pub use pathgen::{ReadingOrder, ReadingPath};
pub use seeding::{QuerySpec, SeedProvider, SeedSet, TerminalMode, TerminalSet};

/// Cost parameters with `f64` scalars.
pub type ScoreParams = scoring::ScoreParams<f64>;
/// Cost parameters with `f32` scalars.
pub type ScoreParamsF32 = scoring::ScoreParams<f32>;
/// Per-paper importance scores with `f64` scalars.
pub type NodeScores = scoring::NodeScores<f64>;
/// Node-edge weighted graph with `f64` costs.
pub type WeightedGraph = steiner::WeightedGraph<f64>;
/// Node-edge weighted graph with `f32` costs.
pub type WeightedGraphF32 = steiner::WeightedGraph<f32>;
/// Steiner tree (or forest) with `f64` costs.
pub type SteinerTree = steiner::SteinerTree<f64>;
