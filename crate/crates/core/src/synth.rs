//! Seeded synthetic corpora for benchmarks, demos and runtime checks.
//!
//! The benchmark corpus has one cluster of papers per topic in three
//! generations: a few old foundational papers, core papers that cite them
//! heavily, and many recent papers that cite the core. A survey per topic
//! references the foundations and core papers; its frozen seed list holds
//! recent papers, so most of the references are only reachable through the
//! seeds' first and second order neighbors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{write_papers, PaperRecord, VenueTable};
use crate::evalbench::{SurveyEntry, SurveyReference};
use crate::ids::PaperId;
use crate::seeding::{OfflineSeedProvider, QuerySpec};

pub const TOPICS: [&str; 10] = [
    "pretrained language model",
    "graph neural network",
    "neural machine translation",
    "reinforcement learning",
    "knowledge graph embedding",
    "image segmentation",
    "speech recognition",
    "recommender system",
    "federated learning",
    "object detection",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkShape {
    pub topics: usize,
    pub foundations: usize,
    pub core: usize,
    pub recent: usize,
    /// Topics (from the first) that get a survey.
    pub surveys: usize,
    pub seeds_per_survey: usize,
    pub rng_seed: u64,
}

impl Default for BenchmarkShape {
    /// Ten topics of 200 papers each, six surveys, thirty seeds.
    fn default() -> Self {
        BenchmarkShape {
            topics: 10,
            foundations: 12,
            core: 40,
            recent: 148,
            surveys: 6,
            seeds_per_survey: 30,
            rng_seed: 20210401,
        }
    }
}

/// A complete fixture: corpus, venue table, benchmark and seed file.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub papers: Vec<PaperRecord>,
    pub venues: VenueTable,
    pub benchmark: Vec<SurveyEntry>,
    pub seeds: OfflineSeedProvider,
}

fn pid(topic: usize, kind: &str, i: usize) -> String {
    format!("t{topic}-{kind}{i:03}")
}

fn title_case(s: &str) -> String {
    s.split(' ')
        .map(|w| {
            let mut c = w.chars();
            c.next()
                .map(|f| f.to_uppercase().collect::<String>() + c.as_str())
                .unwrap_or_default()
        })
        .collect::<Vec<_>>()
        .join(" ")
}

const VENUES: [(&str, f64); 6] = [
    ("NeurIPS", 0.95),
    ("ACL", 0.9),
    ("ICML", 0.9),
    ("AAAI", 0.75),
    ("COLING", 0.55),
    ("Workshop", 0.2),
];

pub fn benchmark_fixture(shape: &BenchmarkShape) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(shape.rng_seed);
    let mut papers = Vec::new();
    let mut benchmark = Vec::new();
    let mut seeds = OfflineSeedProvider::default();
    let venue_keys: Vec<&str> = VENUES.iter().map(|v| v.0).collect();

    let mut recent_by_topic: Vec<Vec<(String, i32)>> = Vec::new();
    for t in 0..shape.topics {
        let topic = TOPICS[t % TOPICS.len()];
        let found: Vec<String> = (0..shape.foundations).map(|i| pid(t, "f", i)).collect();
        let core: Vec<String> = (0..shape.core).map(|i| pid(t, "c", i)).collect();
        for (i, id) in found.iter().enumerate() {
            let mut p = PaperRecord::new(id.as_str(), rng.gen_range(1998..=2006));
            p.title = format!("{}: Foundations {}", title_case(topic), i + 1);
            p.venue = Some(venue_keys[rng.gen_range(0..3)].to_string());
            p.authors = vec![format!("Author F{t}.{i}")];
            papers.push(p);
        }
        for (i, id) in core.iter().enumerate() {
            let mut p = PaperRecord::new(id.as_str(), rng.gen_range(2007..=2013));
            p.title = format!("{}: Core Method {}", title_case(topic), i + 1);
            p.venue = Some(venue_keys[rng.gen_range(0..5)].to_string());
            p.authors = vec![format!("Author C{t}.{i}")];
            let n = rng.gen_range(3..=5);
            for f in found.choose_multiple(&mut rng, n) {
                p = p.cite(f.as_str(), rng.gen_range(1..=4));
            }
            let n = rng.gen_range(0..=2).min(i);
            for c in core[..i].choose_multiple(&mut rng, n) {
                p = p.cite(c.as_str(), rng.gen_range(1..=2));
            }
            papers.push(p);
        }
        let mut recent = Vec::new();
        for i in 0..shape.recent {
            let id = pid(t, "r", i);
            let year = rng.gen_range(2014..=2019);
            let mut p = PaperRecord::new(id.as_str(), year);
            p.title = format!("{}: Recent Advance {}", title_case(topic), i + 1);
            p.venue = if rng.gen_bool(0.3) {
                None
            } else {
                Some(venue_keys[rng.gen_range(1..6)].to_string())
            };
            p.authors = vec![format!("Author R{t}.{i}"), format!("Coauthor R{t}.{i}")];
            let n = rng.gen_range(2..=4);
            for c in core.choose_multiple(&mut rng, n) {
                p = p.cite(c.as_str(), rng.gen_range(1..=2));
            }
            let n = rng.gen_range(0..=2);
            for f in found.choose_multiple(&mut rng, n) {
                p = p.cite(f.as_str(), 1);
            }
            let earlier: Vec<&(String, i32)> = recent.iter().filter(|(_, y)| *y < year).collect();
            let n = rng.gen_range(0..=2);
            for (r, _) in earlier.choose_multiple(&mut rng, n) {
                p = p.cite(r.as_str(), 1);
            }
            papers.push(p);
            recent.push((id, year));
        }
        recent_by_topic.push(recent);
    }

    // Cross-topic noise: some recent papers cite another topic's core.
    let n_topics = shape.topics;
    for p in papers.iter_mut() {
        if p.id.as_str().contains("-r") && n_topics > 1 && rng.gen_bool(0.15) {
            let own: usize = p.id.as_str()[1..p.id.as_str().find('-').unwrap()].parse().unwrap();
            let other = (own + rng.gen_range(1..n_topics)) % n_topics;
            let target = pid(other, "c", rng.gen_range(0..shape.core));
            p.citations.push(crate::corpus::Citation {
                id: target.into(),
                mentions: 1,
            });
        }
    }

    for t in 0..shape.surveys.min(shape.topics) {
        let topic = TOPICS[t % TOPICS.len()];
        let year = 2019;
        let survey_id = pid(t, "survey", 0);
        let mut refs: BTreeMap<String, u32> = BTreeMap::new();
        for i in 0..shape.foundations {
            refs.insert(pid(t, "f", i), rng.gen_range(2..=4));
        }
        let core: Vec<String> = (0..shape.core).map(|i| pid(t, "c", i)).collect();
        for c in core.choose_multiple(&mut rng, shape.core / 2) {
            refs.insert(c.clone(), rng.gen_range(1..=3));
        }
        for (r, _) in recent_by_topic[t].choose_multiple(&mut rng, 10) {
            refs.insert(r.clone(), 1);
        }
        let mut survey = PaperRecord::new(survey_id.as_str(), year);
        survey.title = format!("A Survey on {}", title_case(topic));
        survey.venue = Some("ACL".into());
        survey.authors = vec![format!("Surveyor {t}")];
        for (id, occ) in &refs {
            survey = survey.cite(id.as_str(), *occ);
        }
        papers.push(survey);

        // Search results: mostly recent topic papers, some off-topic noise,
        // the survey itself and an id missing from the corpus.
        let n = shape.seeds_per_survey;
        let noise = n / 8;
        let mut hits: Vec<String> = recent_by_topic[t]
            .choose_multiple(&mut rng, n.saturating_sub(noise + 2))
            .map(|(id, _)| id.clone())
            .collect();
        for _ in 0..noise {
            let other = (t + rng.gen_range(1..n_topics.max(2))) % n_topics.max(1);
            hits.push(pid(other, "r", rng.gen_range(0..shape.recent)));
        }
        hits.shuffle(&mut rng);
        hits.insert(rng.gen_range(0..hits.len().max(1)), survey_id.clone());
        hits.push(format!("missing-{t}"));

        seeds.insert(QuerySpec::new([topic]).query_string(), hits.clone());
        benchmark.push(SurveyEntry {
            survey_id: PaperId::new(survey_id),
            key_phrases: vec![topic.to_string()],
            year,
            citation_count: rng.gen_range(50..500),
            references: refs
                .into_iter()
                .map(|(id, occurrences)| SurveyReference {
                    id: id.into(),
                    occurrences,
                })
                .collect(),
            seeds: hits,
        });
    }

    let venues = VenueTable::new(VENUES.iter().map(|(k, v)| (k.to_string(), *v)).collect())
        .expect("fixture venues are in range");
    Fixture {
        papers,
        venues,
        benchmark,
        seeds,
    }
}

/// Corpus whose second-order neighborhood of the seeds has exactly
/// `seeds + level1 + level2` nodes and
/// `seeds * fanout1 + level1 * fanout2 + extra` edges, plus an outer ring of
/// papers that expansion must not reach. Needs `seeds * fanout1 >= level1`
/// and `level1 * fanout2 >= level2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeShape {
    pub seeds: usize,
    pub level1: usize,
    pub level2: usize,
    pub fanout1: usize,
    pub fanout2: usize,
    /// Extra citations among second-order papers.
    pub extra: usize,
    pub outer: usize,
    pub rng_seed: u64,
}

impl Default for RuntimeShape {
    /// Roughly 1,750 subgraph nodes and 2,900 subgraph edges.
    fn default() -> Self {
        RuntimeShape {
            seeds: 30,
            level1: 250,
            level2: 1500,
            fanout1: 9,
            fanout2: 6,
            extra: 1130,
            outer: 3000,
            rng_seed: 7,
        }
    }
}

pub struct RuntimeFixture {
    pub papers: Vec<PaperRecord>,
    pub seed_ids: Vec<PaperId>,
}

pub fn runtime_fixture(shape: &RuntimeShape) -> RuntimeFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(shape.rng_seed);
    let l2: Vec<String> = (0..shape.level2).map(|i| format!("l2-{i:05}")).collect();
    let l1: Vec<String> = (0..shape.level1).map(|i| format!("l1-{i:05}")).collect();
    let outer: Vec<String> = (0..shape.outer).map(|i| format!("o-{i:05}")).collect();
    let mut papers = Vec::new();
    for id in &outer {
        papers.push(PaperRecord::new(id.as_str(), rng.gen_range(1990..=2000)));
    }
    // Second-order papers cite each other (older index -> newer never
    // reverses, keeping the extra edges acyclic) and the outer ring.
    let mut l2_records: Vec<PaperRecord> = l2
        .iter()
        .map(|id| {
            let mut p = PaperRecord::new(id.as_str(), rng.gen_range(2001..=2010));
            for o in outer.choose_multiple(&mut rng, 2) {
                p = p.cite(o.as_str(), 1);
            }
            p
        })
        .collect();
    let mut added = 0;
    while added < shape.extra {
        let a = rng.gen_range(0..l2.len());
        let b = rng.gen_range(0..l2.len());
        if a == b {
            continue;
        }
        let (src, dst) = (a.max(b), a.min(b));
        if l2_records[src].citations.iter().any(|c| c.id.as_str() == l2[dst]) {
            continue;
        }
        l2_records[src] = l2_records[src].clone().cite(l2[dst].as_str(), rng.gen_range(1..=3));
        added += 1;
    }
    papers.extend(l2_records);
    // Targets are taken cyclically from shuffled orders so every first- and
    // second-order paper is reached.
    let mut order2: Vec<usize> = (0..l2.len()).collect();
    order2.shuffle(&mut rng);
    for (i, id) in l1.iter().enumerate() {
        let mut p = PaperRecord::new(id.as_str(), rng.gen_range(2011..=2015));
        for j in 0..shape.fanout2 {
            let t = order2[(i * shape.fanout2 + j) % l2.len()];
            p = p.cite(l2[t].as_str(), rng.gen_range(1..=3));
        }
        papers.push(p);
    }
    let mut order1: Vec<usize> = (0..l1.len()).collect();
    order1.shuffle(&mut rng);
    let mut seed_ids = Vec::new();
    for s in 0..shape.seeds {
        let id = format!("seed-{s:03}");
        let mut p = PaperRecord::new(id.as_str(), rng.gen_range(2016..=2020));
        for j in 0..shape.fanout1 {
            let t = order1[(s * shape.fanout1 + j) % l1.len()];
            p = p.cite(l1[t].as_str(), rng.gen_range(1..=3));
        }
        papers.push(p);
        seed_ids.push(PaperId::new(id));
    }
    RuntimeFixture { papers, seed_ids }
}

/// Writes `papers.jsonl`, `venues.json`, `benchmark.jsonl`, `seeds.json` and
/// a `config.json` pointing at them.
pub fn write_fixture(fixture: &Fixture, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    write_papers(fs::File::create(dir.join("papers.jsonl"))?, &fixture.papers)?;
    fs::write(dir.join("venues.json"), serde_json::to_string_pretty(&fixture.venues)? + "\n")?;
    let mut bench = fs::File::create(dir.join("benchmark.jsonl"))?;
    for e in &fixture.benchmark {
        serde_json::to_writer(&mut bench, e)?;
        bench.write_all(b"\n")?;
    }
    fs::write(dir.join("seeds.json"), serde_json::to_string_pretty(&fixture.seeds)? + "\n")?;
    let config = serde_json::json!({
        "papers_path": "papers.jsonl",
        "venues_path": "venues.json",
        "seed_provider": {"kind": "offline", "path": "seeds.json"},
        "bind": "127.0.0.1:8080"
    });
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(&config)? + "\n")?;
    Ok(())
}
