//! CLI and HTTP service around the `readpath` pipeline.

pub mod api;
pub mod cli;
pub mod config;
pub mod engine;
pub mod provider;

pub use api::router;
pub use config::EngineConfig;
pub use engine::{Engine, QueryRequest, QueryResult};
