//! Turns a Steiner tree into a reading path.
//!
//! Arrows point from prerequisite to dependent: from the cited paper to the
//! citing one, or from older to newer when the citation direction is absent
//! or mutual.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CitationGraph;
use crate::ids::PaperId;
use crate::scoring::{con, NodeScores};
use crate::steiner::{Cost, SteinerTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("reading path contains a cycle")]
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathNode {
    pub id: PaperId,
    pub year: i32,
    /// Combined importance `a * pgscore + b * venue`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEdge {
    pub from: PaperId,
    pub to: PaperId,
    /// Mentions between the two papers, both directions summed.
    pub relevance: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReadingPath {
    pub nodes: Vec<PathNode>,
    pub edges: Vec<PathEdge>,
    /// Nodes without incoming edges.
    pub roots: Vec<PaperId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReadingOrder(pub Vec<PaperId>);

/// `(from, to)` for the tree edge `{u, v}`.
pub fn orient_edge<'a>(corpus: &CitationGraph, u: &'a PaperId, v: &'a PaperId) -> (&'a PaperId, &'a PaperId) {
    let v_cites_u = corpus.mentions(v.as_str(), u.as_str()).is_some();
    let u_cites_v = corpus.mentions(u.as_str(), v.as_str()).is_some();
    match (v_cites_u, u_cites_v) {
        (true, false) => (u, v),
        (false, true) => (v, u),
        _ => {
            let yu = corpus.year(u.as_str()).unwrap_or(i32::MAX);
            let yv = corpus.year(v.as_str()).unwrap_or(i32::MAX);
            if (yu, u) <= (yv, v) {
                (u, v)
            } else {
                (v, u)
            }
        }
    }
}

pub fn orient<S: Cost>(tree: &SteinerTree<S>, corpus: &CitationGraph, scores: &NodeScores<f64>) -> ReadingPath {
    let nodes: Vec<PathNode> = tree
        .nodes
        .iter()
        .map(|id| PathNode {
            id: id.clone(),
            year: corpus.year(id.as_str()).unwrap_or_default(),
            weight: scores.combined(id.as_str()).unwrap_or(0.0),
        })
        .collect();
    let mut edges: Vec<PathEdge> = tree
        .edges
        .iter()
        .map(|e| {
            let (from, to) = orient_edge(corpus, &e.a, &e.b);
            PathEdge {
                from: from.clone(),
                to: to.clone(),
                relevance: con(corpus, e.a.as_str(), e.b.as_str()) as f64,
            }
        })
        .collect();
    edges.sort_by(|x, y| (&x.from, &x.to).cmp(&(&y.from, &y.to)));
    let targets: BTreeSet<&PaperId> = edges.iter().map(|e| &e.to).collect();
    let roots = tree
        .nodes
        .iter()
        .filter(|n| !targets.contains(n))
        .cloned()
        .collect();
    ReadingPath { nodes, edges, roots }
}

/// Topological order; among available nodes the oldest comes first, then
/// the smaller id.
pub fn reading_order(path: &ReadingPath) -> Result<ReadingOrder, PathError> {
    let year: BTreeMap<&PaperId, i32> = path.nodes.iter().map(|n| (&n.id, n.year)).collect();
    let mut indegree: BTreeMap<&PaperId, usize> = path.nodes.iter().map(|n| (&n.id, 0)).collect();
    let mut out: BTreeMap<&PaperId, Vec<&PaperId>> = BTreeMap::new();
    for e in &path.edges {
        *indegree.entry(&e.to).or_default() += 1;
        indegree.entry(&e.from).or_default();
        out.entry(&e.from).or_default().push(&e.to);
    }
    let key = |id: &PaperId| (year.get(id).copied().unwrap_or(i32::MAX), id.clone());
    let mut ready: BinaryHeap<Reverse<(i32, PaperId)>> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(id, _)| Reverse(key(id)))
        .collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(Reverse((_, id))) = ready.pop() {
        if let Some(next) = out.get(&id) {
            for &n in next {
                let d = indegree.get_mut(n).expect("edge endpoint");
                *d -= 1;
                if *d == 0 {
                    ready.push(Reverse(key(n)));
                }
            }
        }
        order.push(id);
    }
    if order.len() != indegree.len() {
        return Err(PathError::Cycle);
    }
    Ok(ReadingOrder(order))
}

/// Tree nodes by combined score (descending, ties by id), padded with
/// `spares` in their given order, truncated to `k`.
pub fn top_k_list<S: Cost>(
    tree: &SteinerTree<S>,
    scores: &NodeScores<f64>,
    spares: &[PaperId],
    k: usize,
) -> Vec<PaperId> {
    let mut list = scores.rank_by_combined(&tree.nodes);
    list.truncate(k);
    if list.len() < k {
        let have: BTreeSet<PaperId> = list.iter().cloned().collect();
        list.extend(
            spares
                .iter()
                .filter(|s| !have.contains(*s))
                .take(k - list.len())
                .cloned(),
        );
    }
    list
}
