//! Random instances and independent reference implementations shared by the
//! integration tests.

#![allow(clippy::needless_range_loop, dead_code)]

use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use readpath::steiner::{Cost, WeightedGraph};
use readpath::PaperId;

pub type Exact = Ratio<i64>;

pub fn node_name(i: usize) -> String {
    format!("n{i:02}")
}

/// Connected graph on `n` nodes: a random spanning tree plus each remaining
/// pair with probability `density`. Weights and costs are drawn by `draw`.
pub fn random_graph<S: Cost, R: Rng>(
    rng: &mut R,
    n: usize,
    density: f64,
    mut draw: impl FnMut(&mut R) -> S,
) -> WeightedGraph<S> {
    let mut b = WeightedGraph::builder();
    for i in 0..n {
        let w = draw(rng);
        b.add_node(node_name(i), w);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (u, v) = (order[i].min(order[j]), order[i].max(order[j]));
        present.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present.contains(&(u, v)) && rng.gen_bool(density) {
                present.insert((u, v));
            }
        }
    }
    for (u, v) in present {
        let c = draw(rng);
        b.add_edge(node_name(u), node_name(v), c);
    }
    b.build().expect("generated graph is valid")
}

pub fn exact_in(lo: i64, hi: i64) -> impl FnMut(&mut rand_chacha::ChaCha8Rng) -> Exact {
    move |rng| Ratio::from_integer(rng.gen_range(lo..=hi))
}

pub fn pick_terminals<S: Cost, R: Rng>(rng: &mut R, g: &WeightedGraph<S>, count: usize) -> Vec<PaperId> {
    let mut ids: Vec<PaperId> = g.ids().to_vec();
    ids.shuffle(rng);
    ids.truncate(count);
    ids
}

/// All-pairs distances where entering node `v` over edge `{u, v}` costs
/// `c(u, v) + w(v)`; Floyd-Warshall on the resulting directed matrix.
pub fn floyd_warshall<S: Cost>(g: &WeightedGraph<S>) -> Vec<Vec<Option<S>>> {
    let n = g.node_count();
    let mut d: Vec<Vec<Option<S>>> = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(S::zero());
    }
    for (u, v, c) in g.edges() {
        d[u][v] = Some(c + g.weight(v));
        d[v][u] = Some(c + g.weight(u));
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                let Some(kj) = d[k][j] else { continue };
                let via = ik + kj;
                if d[i][j].is_none_or(|cur| via < cur) {
                    d[i][j] = Some(via);
                }
            }
        }
    }
    d
}

/// Prim's algorithm on an adjacency matrix; total cost of a minimum
/// spanning tree of a connected graph.
pub fn prim_total<S: Cost>(g: &WeightedGraph<S>) -> S {
    let n = g.node_count();
    let mut matrix: Vec<Vec<Option<S>>> = vec![vec![None; n]; n];
    for (u, v, c) in g.edges() {
        matrix[u][v] = Some(c);
        matrix[v][u] = Some(c);
    }
    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<S>> = vec![None; n];
    best[0] = Some(S::zero());
    let mut total = S::zero();
    for _ in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v] && best[v].is_some())
            .min_by(|&a, &b| best[a].unwrap().partial_cmp(&best[b].unwrap()).unwrap())
            .expect("graph is connected");
        in_tree[u] = true;
        total = total + best[u].unwrap();
        for v in 0..n {
            if let Some(c) = matrix[u][v] {
                if !in_tree[v] && best[v].is_none_or(|b| c < b) {
                    best[v] = Some(c);
                }
            }
        }
    }
    total
}

/// PageRank by repeated dense matrix-vector products, with rank flowing
/// along `links[i] -> j` and dangling mass spread uniformly.
pub fn dense_pagerank(links: &[Vec<usize>], damping: f64, iterations: usize) -> Vec<f64> {
    let n = links.len();
    let mut m = vec![vec![0.0f64; n]; n];
    for (i, out) in links.iter().enumerate() {
        if out.is_empty() {
            for row in m.iter_mut() {
                row[i] = 1.0 / n as f64;
            }
        } else {
            for &j in out {
                m[j][i] += 1.0 / out.len() as f64;
            }
        }
    }
    let mut r = vec![1.0 / n as f64; n];
    for _ in 0..iterations {
        r = (0..n)
            .map(|j| (1.0 - damping) / n as f64 + damping * (0..n).map(|i| m[j][i] * r[i]).sum::<f64>())
            .collect();
    }
    r
}
