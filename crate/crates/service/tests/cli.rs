//! End-to-end runs of the `readpath` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn readpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_readpath"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn fixture(dir: &Path) -> String {
    let out = readpath(&["gen-fixture", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("config.json").to_str().unwrap().to_string()
}

#[test]
fn query_writes_a_result() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture(dir.path());
    let out_path = dir.path().join("result.json");
    let out = readpath(&[
        "query",
        "--config",
        &config,
        "--phrases",
        "pretrained language model",
        "--k",
        "30",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["ranked"].as_array().unwrap().len(), 30);
    assert!(!v["edges"].as_array().unwrap().is_empty());
    assert_eq!(v["query"], "pretrained language model");
}

#[test]
fn query_without_seeds_fails_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture(dir.path());
    let out = readpath(&["query", "--config", &config, "--phrases", "no such topic"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains("no seed"));
}

#[test]
fn eval_reports_are_written_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture(dir.path());
    let bench = dir.path().join("benchmark.jsonl");
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = readpath(&[
            "eval",
            "--config",
            &config,
            "--benchmark",
            bench.to_str().unwrap(),
            "--modes",
            "NEWST,NEWST-W",
            "--K",
            "20,30,40,50",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["report.json", "report.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let report: Value = serde_json::from_slice(&fs::read(a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 6 * 2 * 4);
    let timings = fs::read_to_string(a.join("timings.csv")).unwrap();
    assert!(timings.starts_with("survey_id,mode,seeds,nodes,edges,seconds"));
    assert_eq!(timings.lines().count(), 1 + 6 * 2);
}

#[test]
fn eval_rejects_unknown_modes() {
    let out = readpath(&["eval", "--papers", "p", "--benchmark", "b", "--modes", "NEWST_X", "--out-dir", "o"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("NEWST_X"));
}

#[test]
fn ingest_names_the_malformed_line() {
    let dir = tempfile::tempdir().unwrap();
    let papers = dir.path().join("bad.jsonl");
    let mut text: String = (0..6)
        .map(|i| format!("{{\"id\": \"p{i}\", \"title\": \"t\", \"year\": 2010, \"venue\": null, \"authors\": [], \"citations\": []}}\n"))
        .collect();
    text.push_str("{\"id\": \"p6\", \"year\": \n");
    fs::write(&papers, text).unwrap();
    let out = readpath(&["ingest", "--papers", papers.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains("line 7"), "{err}");
}

#[test]
fn ingest_writes_a_clean_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let papers = dir.path().join("papers.jsonl");
    fs::write(
        &papers,
        concat!(
            "{\"id\": \"a\", \"title\": \"A\", \"year\": 2010, \"venue\": null, \"authors\": [], \"citations\": [{\"id\": \"b\", \"mentions\": 1}, {\"id\": \"zz\", \"mentions\": 1}]}\n",
            "{\"id\": \"b\", \"title\": \"B\", \"year\": 2009, \"venue\": null, \"authors\": [], \"citations\": [{\"id\": \"b\", \"mentions\": 2}]}\n",
        ),
    )
    .unwrap();
    let clean = dir.path().join("clean.jsonl");
    let out = readpath(&["ingest", "--papers", papers.to_str().unwrap(), "--out", clean.to_str().unwrap()]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((report["dangling"].as_u64(), report["self_citations"].as_u64()), (Some(1), Some(1)));
    let again = readpath(&["ingest", "--papers", clean.to_str().unwrap()]);
    let report: Value = serde_json::from_slice(&again.stdout).unwrap();
    assert_eq!((report["papers"].as_u64(), report["edges"].as_u64(), report["dangling"].as_u64()), (Some(2), Some(1), Some(0)));
}
