//! Exhaustive solver for small instances, used to check the heuristic.
//!
//! Every superset of the terminals is tried; a connected candidate costs its
//! minimum spanning tree plus all of its node weights. Exponential in the
//! number of non-terminals, hence the node limit.

use std::collections::BTreeSet;

use super::{kruskal, Cost, NodeIx, SteinerError, SteinerTree, Subtree, WeightedGraph};
use crate::ids::PaperId;

pub const MAX_NODES: usize = 16;

/// Optimal Steiner tree for graphs of at most [`MAX_NODES`] nodes. The
/// terminals must lie in one connected component.
pub fn exact_steiner<S: Cost>(
    graph: &WeightedGraph<S>,
    terminals: &[PaperId],
) -> Result<SteinerTree<S>, SteinerError> {
    let n = graph.node_count();
    if n > MAX_NODES {
        return Err(SteinerError::TooLarge {
            nodes: n,
            max: MAX_NODES,
        });
    }
    let terms = graph.resolve_terminals(terminals)?;
    let term_set: BTreeSet<NodeIx> = terms.iter().copied().collect();
    let optional: Vec<NodeIx> = (0..n).filter(|i| !term_set.contains(i)).collect();
    let all_edges: Vec<(NodeIx, NodeIx, S)> = graph.edges().collect();

    let mut best: Option<(S, Subtree)> = None;
    for mask in 0u32..(1u32 << optional.len()) {
        let mut members = term_set.clone();
        for (bit, &node) in optional.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                members.insert(node);
            }
        }
        let nodes: Vec<NodeIx> = members.iter().copied().collect();
        let edges: Vec<_> = all_edges
            .iter()
            .copied()
            .filter(|(u, v, _)| members.contains(u) && members.contains(v))
            .collect();
        let Ok(tree) = kruskal(&nodes, &edges) else {
            continue;
        };
        let cost = tree.iter().fold(S::zero(), |acc, e| acc + e.2);
        let cost = nodes.iter().fold(cost, |acc, &v| acc + graph.weight(v));
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            let mut shape = Subtree {
                nodes: members,
                edges: BTreeSet::new(),
            };
            for (u, v, _) in tree {
                shape.insert_edge(u, v);
            }
            best = Some((cost, shape));
        }
    }
    let (_, shape) = best.ok_or(SteinerError::TerminalsDisconnected)?;
    Ok(SteinerTree::from_subtree(graph, &shape, &terms, 1, &[]))
}
