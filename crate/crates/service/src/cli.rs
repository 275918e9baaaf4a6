//! Command-line entry points.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use readpath::corpus::{load_papers, load_venues, write_papers, VenueTable};
use readpath::evalbench::{load_benchmark, run_eval, timings_csv, AblationMode, EvalConfig};
use readpath::pipeline::PipelineConfig;
use readpath::synth::{benchmark_fixture, write_fixture, BenchmarkShape};

use crate::api::router;
use crate::config::EngineConfig;
use crate::engine::{Engine, Phrases, QueryRequest};

#[derive(Debug, Parser)]
#[command(name = "readpath", version, about = "Reading paths over citation graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a papers file and optionally write the cleaned corpus.
    Ingest(IngestArgs),
    /// Run one query and print the result as JSON.
    Query(QueryArgs),
    /// Score generated lists against a survey benchmark.
    Eval(EvalArgs),
    /// Start the HTTP service.
    Serve(ServeArgs),
    /// Write the synthetic benchmark corpus, seeds and config.
    GenFixture(GenFixtureArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub papers: PathBuf,
    #[arg(long)]
    pub venues: Option<PathBuf>,
    /// Cleaned JSONL: dangling and self citations dropped, duplicates merged.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Key phrase; repeat for several.
    #[arg(long = "phrases", required = true)]
    pub phrases: Vec<String>,
    /// Length of the ranked list.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub k_seeds: Option<usize>,
    #[arg(long)]
    pub cutoff_year: Option<i32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Engine config supplying corpus paths and pipeline settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub papers: Option<PathBuf>,
    #[arg(long)]
    pub venues: Option<PathBuf>,
    #[arg(long)]
    pub benchmark: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "NEWST")]
    pub modes: Vec<AblationMode>,
    #[arg(long = "K", value_delimiter = ',', default_value = "20,30,40,50")]
    pub ks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub levels: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_value = "30")]
    pub seed_counts: Vec<usize>,
    /// Receives report.json, report.csv and timings.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub bind: Option<String>,
}

#[derive(Debug, Args)]
pub struct GenFixtureArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Query(a) => query(a),
        Command::Eval(a) => eval(a),
        Command::Serve(a) => serve(a),
        Command::GenFixture(a) => {
            let fixture = benchmark_fixture(&BenchmarkShape::default());
            write_fixture(&fixture, &a.out_dir).with_context(|| format!("writing {}", a.out_dir.display()))
        }
    }
}

fn ingest(args: IngestArgs) -> anyhow::Result<()> {
    let (graph, report) = load_papers(&args.papers).with_context(|| args.papers.display().to_string())?;
    if let Some(v) = &args.venues {
        load_venues(v).with_context(|| v.display().to_string())?;
    }
    if let Some(out) = &args.out {
        let file = fs::File::create(out).with_context(|| out.display().to_string())?;
        write_papers(std::io::BufWriter::new(file), graph.papers())?;
    }
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| p.display().to_string()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn query(args: QueryArgs) -> anyhow::Result<()> {
    let config = EngineConfig::load(&args.config)?;
    let engine = Engine::from_config(&config)?;
    let result = engine.query(QueryRequest {
        phrases: Phrases::Many(args.phrases),
        k_seeds: args.k_seeds,
        k_output: args.k,
        cutoff_year: args.cutoff_year,
    })?;
    write_output(args.out.as_deref(), &(serde_json::to_string_pretty(&result)? + "\n"))
}

fn eval(args: EvalArgs) -> anyhow::Result<()> {
    let config = args.config.as_deref().map(EngineConfig::load).transpose()?;
    let papers = match (&args.papers, &config) {
        (Some(p), _) => p.clone(),
        (None, Some(c)) => c.papers_path.clone(),
        (None, None) => bail!("eval needs --papers or --config"),
    };
    let venues_path = args.venues.clone().or_else(|| config.as_ref().and_then(|c| c.venues_path.clone()));
    let (graph, _) = load_papers(&papers).with_context(|| papers.display().to_string())?;
    let venues = match &venues_path {
        Some(v) => load_venues(v).with_context(|| v.display().to_string())?,
        None => VenueTable::default(),
    };
    let benchmark = load_benchmark(&args.benchmark).with_context(|| args.benchmark.display().to_string())?;
    let eval_config = EvalConfig {
        pipeline: config.map(|c| c.pipeline).unwrap_or_else(PipelineConfig::default),
        modes: args.modes,
        ks: args.ks,
        levels: args.levels,
        seed_counts: args.seed_counts,
    };
    let output = run_eval(&benchmark, &graph, &venues, &eval_config)?;
    fs::create_dir_all(&args.out_dir).with_context(|| args.out_dir.display().to_string())?;
    fs::write(args.out_dir.join("report.json"), output.report.to_json() + "\n")?;
    fs::write(args.out_dir.join("report.csv"), output.report.to_csv()?)?;
    fs::write(args.out_dir.join("timings.csv"), timings_csv(&output.timings)?)?;
    for a in &output.report.aggregates {
        eprintln!(
            "{:<18} seeds={:<3} K={:<3} L{}  P={:.4} R={:.4} F1={:.4} (n={})",
            a.mode.name(),
            a.seeds,
            a.k,
            a.level,
            a.precision,
            a.recall,
            a.f1,
            a.queries
        );
    }
    for s in &output.report.skipped {
        eprintln!("skipped {} with {} seeds: {}", s.survey_id, s.seeds, s.reason);
    }
    Ok(())
}

fn serve(args: ServeArgs) -> anyhow::Result<()> {
    let mut config = EngineConfig::load(&args.config)?;
    if let Some(b) = args.bind {
        config.bind = b;
    }
    let addr = config.bind_addr().map_err(anyhow::Error::msg)?;
    let engine = Arc::new(Engine::from_config(&config)?);
    let app = router(engine, config.cors_origin.as_deref());
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        tracing::info!(%addr, "listening");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
