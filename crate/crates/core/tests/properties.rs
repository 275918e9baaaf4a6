//! Property tests over random corpora, weighted graphs and rankings.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{node_name, Exact};
use proptest::prelude::*;
use readpath::corpus::{parse_papers, write_papers, CitationGraph, Direction, PaperRecord};
use readpath::evalbench::{ground_truth, metrics_at_k, SurveyEntry, SurveyReference};
use readpath::pathgen::{orient, reading_order, top_k_list};
use readpath::scoring::{edge_cost, node_weight, pagerank, NodeScores, ScoreParams};
use readpath::seeding::{cooccurrence_counts, reallocate_terminals, reallocated, TerminalMode};
use readpath::steiner::oracle::exact_steiner;
use readpath::steiner::{newst, WeightedGraph};
use readpath::{PaperId, VenueTable};

fn pid(i: usize) -> PaperId {
    PaperId::new(format!("p{i:02}"))
}

/// Corpus of `n` papers with years 2000..2020 and citations `(src, dst, mentions)`.
fn corpus_strategy(max: usize) -> impl Strategy<Value = Vec<PaperRecord>> {
    (1..=max)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(2000i32..2020, n),
                proptest::collection::vec((0..n, 0..n, 1u32..4), 0..n * 3),
            )
        })
        .prop_map(|(years, cites)| {
            let mut records: Vec<PaperRecord> = years
                .iter()
                .enumerate()
                .map(|(i, y)| PaperRecord::new(pid(i), *y))
                .collect();
            for (s, d, m) in cites {
                if s != d && !records[s].citations.iter().any(|c| c.id == pid(d)) {
                    records[s] = records[s].clone().cite(pid(d), m);
                }
            }
            records
        })
}

fn graph(records: &[PaperRecord]) -> CitationGraph {
    CitationGraph::from_records(records.iter().cloned()).unwrap().0
}

/// Connected weighted graph with integer weights, as exact rationals.
fn weighted_strategy(max: usize) -> impl Strategy<Value = WeightedGraph<Exact>> {
    (2..=max)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(1i64..20, n),
                proptest::collection::vec(1i64..20, n - 1),
                proptest::collection::vec((0..n, 0..n, 1i64..20), 0..n * 2),
                proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
            )
        })
        .prop_map(|(weights, tree_costs, extra, parents)| {
            let n = weights.len();
            let mut b = WeightedGraph::builder();
            for (i, w) in weights.iter().enumerate() {
                b.add_node(node_name(i), Exact::from_integer(*w));
            }
            let mut seen = BTreeSet::new();
            for i in 1..n {
                let p = parents[i - 1].index(i);
                seen.insert((p, i));
                b.add_edge(node_name(p), node_name(i), Exact::from_integer(tree_costs[i - 1]));
            }
            for (u, v, c) in extra {
                let key = (u.min(v), u.max(v));
                if u != v && seen.insert(key) {
                    b.add_edge(node_name(key.0), node_name(key.1), Exact::from_integer(c));
                }
            }
            b.build().unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn cited_by_is_the_transpose(records in corpus_strategy(20)) {
        let g = graph(&records);
        let forward: BTreeSet<(String, String)> =
            g.edges().map(|(s, t, _)| (s.to_string(), t.to_string())).collect();
        let backward: BTreeSet<(String, String)> = g
            .ids()
            .flat_map(|t| g.cited_by(t.as_str()).iter().map(move |s| (s.to_string(), t.to_string())))
            .collect();
        prop_assert_eq!(forward.len(), g.edge_count());
        prop_assert_eq!(forward, backward);
    }

    #[test]
    fn write_then_parse_roundtrips(records in corpus_strategy(20)) {
        let g = graph(&records);
        let mut buf = Vec::new();
        write_papers(&mut buf, g.papers()).unwrap();
        let (again, report) = parse_papers(buf.as_slice()).unwrap();
        prop_assert_eq!(&again, &g);
        prop_assert_eq!(report.dangling, 0);
    }

    #[test]
    fn neighborhoods_grow_with_order(records in corpus_strategy(20), seed_mask in any::<u32>()) {
        let g = graph(&records);
        let seeds: Vec<PaperId> = g.ids().enumerate().filter(|(i, _)| seed_mask >> (i % 32) & 1 == 1).map(|(_, id)| id.clone()).collect();
        for dir in [Direction::Out, Direction::Both] {
            let one = g.neighborhood(&seeds, 1, dir).unwrap();
            let two = g.neighborhood(&seeds, 2, dir).unwrap();
            prop_assert!(seeds.iter().all(|s| one.contains(s.as_str())));
            prop_assert!(one.ids().all(|id| two.contains(id.as_str())));
            prop_assert!(one.edge_count() <= two.edge_count());
        }
        let out = g.neighborhood(&seeds, 2, Direction::Out).unwrap();
        let both = g.neighborhood(&seeds, 2, Direction::Both).unwrap();
        prop_assert!(out.ids().all(|id| both.contains(id.as_str())));
    }

    #[test]
    fn year_filter_is_a_threshold(records in corpus_strategy(20), cutoff in 1999i32..2021) {
        let g = graph(&records);
        let f = g.filter_by_year(cutoff);
        prop_assert!(f.papers().all(|p| p.year <= cutoff));
        prop_assert_eq!(f.len(), g.papers().filter(|p| p.year <= cutoff).count());
        prop_assert_eq!(f.filter_by_year(cutoff), f);
    }

    #[test]
    fn pagerank_is_a_distribution_with_teleport_floor(records in corpus_strategy(25)) {
        let g = graph(&records);
        let p = ScoreParams::default();
        let pr = pagerank(&g, &p).unwrap();
        let n = g.len() as f64;
        let sum: f64 = pr.values().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert!(pr.values().all(|&v| v >= (1.0 - p.damping) / n - 1e-9));
    }

    #[test]
    fn pagerank_ignores_labels(records in corpus_strategy(15), shift in 1usize..50) {
        // Renaming every paper (which reorders the internal indices) must
        // not change any score.
        let g = graph(&records);
        let rename = |id: &PaperId| PaperId::new(format!("q{:03}", (id.as_str()[1..].parse::<usize>().unwrap() * 7 + shift) % 1000));
        let renamed: Vec<PaperRecord> = records
            .iter()
            .map(|r| {
                let mut out = PaperRecord::new(rename(&r.id), r.year);
                for c in &r.citations {
                    out = out.cite(rename(&c.id), c.mentions);
                }
                out
            })
            .collect();
        let p: ScoreParams<f64> = ScoreParams { pr_tolerance: 1e-13, pr_max_iters: 1000, ..Default::default() };
        let a = pagerank(&g, &p).unwrap();
        let b = pagerank(&graph(&renamed), &p).unwrap();
        for (id, v) in &a {
            prop_assert!((v - b[&rename(id)]).abs() < 1e-10);
        }
    }

    #[test]
    fn costs_fall_as_evidence_grows(con in 1u32..1000, pg in 0.0001f64..1.0, venue in 0.0f64..1.0, bump in 0.001f64..0.5) {
        let p = ScoreParams::default();
        prop_assert!(edge_cost(&p, con + 1).unwrap() < edge_cost(&p, con).unwrap());
        let base = node_weight(&p, pg, venue).unwrap();
        prop_assert!(node_weight(&p, pg + bump, venue).unwrap() < base);
        prop_assert!(node_weight(&p, pg, venue + bump).unwrap() < base);
        prop_assert!(base > 0.0);
    }

    #[test]
    fn cooccurrence_matches_brute_force(records in corpus_strategy(20), seed_mask in any::<u32>()) {
        let g = graph(&records);
        let seeds: Vec<PaperId> = g.ids().enumerate().filter(|(i, _)| seed_mask >> (i % 32) & 1 == 1).map(|(_, id)| id.clone()).collect();
        let counts = cooccurrence_counts(&g, &seeds);
        let mut brute: BTreeMap<PaperId, usize> = BTreeMap::new();
        for p in g.ids() {
            let n = seeds.iter().filter(|s| g.references(s.as_str()).iter().any(|c| &c.id == p)).count();
            if n > 0 {
                brute.insert(p.clone(), n);
            }
        }
        prop_assert_eq!(&counts, &brute);
        prop_assert!(counts.values().all(|&c| c <= seeds.len()));
        for t in 1..4 {
            prop_assert!(reallocated(&counts, t + 1).is_subset(&reallocated(&counts, t)));
        }
        if !seeds.is_empty() {
            let get = |m| reallocate_terminals(&g, &seeds, 2, m);
            let (init, re, uni, int) = (get(TerminalMode::Initial), get(TerminalMode::Reallocated), get(TerminalMode::Union), get(TerminalMode::Intersection));
            prop_assert!(init.ids.is_subset(&uni.ids));
            if !re.fell_back {
                prop_assert!(re.ids.is_subset(&uni.ids));
            }
            if !int.fell_back {
                prop_assert!(int.ids.is_subset(&init.ids) && int.ids.is_subset(&re.ids));
            }
        }
    }

    #[test]
    fn heuristic_tree_invariants(g in weighted_strategy(10), mask in 1u32..1024) {
        let terms: Vec<PaperId> = g.ids().iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, id)| id.clone()).collect();
        prop_assume!(!terms.is_empty());
        let t = newst(&g, &terms).unwrap();
        prop_assert_eq!(&t, &newst(&g, &terms).unwrap());
        prop_assert_eq!(t.total_cost, t.recompute_cost(&g));
        prop_assert!(terms.iter().all(|x| t.contains(x.as_str())));
        prop_assert_eq!(t.edges.len() + 1, t.nodes.len());
        // Pruning leaves no optional leaf behind.
        let mut degree: BTreeMap<&PaperId, usize> = BTreeMap::new();
        for e in &t.edges {
            *degree.entry(&e.a).or_default() += 1;
            *degree.entry(&e.b).or_default() += 1;
        }
        for n in &t.nodes {
            if degree.get(n).copied().unwrap_or(0) <= 1 {
                prop_assert!(terms.contains(n));
            }
        }
        prop_assert!(t.total_cost >= exact_steiner(&g, &terms).unwrap().total_cost);
    }

    #[test]
    fn reading_order_is_a_topological_permutation(records in corpus_strategy(15), mask in any::<u32>()) {
        let g = graph(&records);
        let mut b = WeightedGraph::builder();
        for id in g.ids() {
            b.add_node(id.clone(), 1.0);
        }
        let mut seen = BTreeSet::new();
        for (s, t, m) in g.edges() {
            if seen.insert((s.min(t).clone(), s.max(t).clone())) {
                b.add_edge(s.clone(), t.clone(), 1.0 / m as f64);
            }
        }
        let wg = b.build().unwrap();
        let terms: Vec<PaperId> = g.ids().enumerate().filter(|(i, _)| mask >> (i % 32) & 1 == 1).map(|(_, id)| id.clone()).collect();
        prop_assume!(!terms.is_empty());
        let tree = newst(&wg, &terms).unwrap();
        let scores = NodeScores::compute(&g, &VenueTable::default(), &ScoreParams::default()).unwrap();
        let path = orient(&tree, &g, &scores);
        let order = reading_order(&path).unwrap().0;
        let mut sorted = order.clone();
        sorted.sort();
        prop_assert_eq!(&sorted, &tree.nodes);
        let pos: BTreeMap<&PaperId, usize> = order.iter().enumerate().map(|(i, id)| (id, i)).collect();
        prop_assert!(path.edges.iter().all(|e| pos[&e.from] < pos[&e.to]));
        for k in 1..=tree.nodes.len() + 3 {
            let spares: Vec<PaperId> = g.ids().filter(|id| !tree.contains(id.as_str())).cloned().collect();
            let short = top_k_list(&tree, &scores, &spares, k);
            let long = top_k_list(&tree, &scores, &spares, k + 1);
            prop_assert!(short.len() <= k);
            prop_assert_eq!(&long[..short.len()], &short[..]);
        }
    }

    #[test]
    fn metrics_stay_in_range(predicted in proptest::collection::vec(0usize..30, 0..40), truth in proptest::collection::btree_set(0usize..30, 0..20), k in 1usize..40) {
        let predicted: Vec<PaperId> = predicted.into_iter().map(pid).collect();
        let truth: BTreeSet<PaperId> = truth.into_iter().map(pid).collect();
        let m = metrics_at_k(&predicted, &truth, k);
        for v in [m.precision, m.recall, m.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(m.f1 <= 2.0 * m.precision.min(m.recall) + 1e-12);
        prop_assert_eq!(m.empty_truth, truth.is_empty());
    }

    #[test]
    fn truth_levels_nest(occ in proptest::collection::vec((0usize..30, 1u32..5), 0..40)) {
        let entry = SurveyEntry {
            survey_id: pid(99),
            key_phrases: vec!["x".into()],
            year: 2019,
            citation_count: 1,
            references: occ.into_iter().map(|(i, o)| SurveyReference { id: pid(i), occurrences: o }).collect(),
            seeds: vec![],
        };
        let t = ground_truth(&entry);
        prop_assert!(t.l3.is_subset(&t.l2) && t.l2.is_subset(&t.l1));
    }
}
