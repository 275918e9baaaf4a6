//! Node-edge weighted Steiner trees.
//!
//! Minimizes `sum of edge costs + sum of node weights` over trees spanning a
//! set of compulsory terminals with the distance-network heuristic:
//!
//! 1. metric closure over the terminals (shortest paths that pay node weights),
//! 2. minimum spanning tree of the closure,
//! 3. splice every closure edge back into its shortest path,
//! 4. minimum spanning tree of the spliced subgraph,
//! 5. strip non-terminal leaves.
//!
//! Shortest paths use the node-cost-on-entry convention: moving along `{u, v}`
//! into `v` costs `c(u, v) + w(v)`, so the source weight is never paid.
//! Terminals in different connected components yield a forest.
//!
//! Everything here is generic over the scalar [`Cost`]; `f64` is the working
//! type, exact rationals are used to check the solver without rounding.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt::Debug;

use num_traits::Num;
use serde::Serialize;
use thiserror::Error;

use crate::ids::PaperId;

pub mod oracle;

/// Scalar usable as a cost: any ordered numeric type.
pub trait Cost: Num + Copy + PartialOrd + Debug {}

impl<T: Num + Copy + PartialOrd + Debug> Cost for T {}

/// Dense node index into a [`WeightedGraph`]. Indices follow id order.
pub type NodeIx = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node {0}")]
    DuplicateNode(PaperId),
    #[error("edge references unknown node {0}")]
    UnknownNode(PaperId),
    #[error("self-loop on {0}")]
    SelfLoop(PaperId),
    #[error("parallel edge {0} -- {1}")]
    ParallelEdge(PaperId, PaperId),
    #[error("node {0} has a non-positive weight")]
    NonPositiveWeight(PaperId),
    #[error("edge {0} -- {1} has a non-positive cost")]
    NonPositiveCost(PaperId, PaperId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteinerError {
    #[error("terminal set is empty")]
    EmptyTerminals,
    #[error("unknown node {0}")]
    UnknownNode(PaperId),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("terminals are not connected")]
    TerminalsDisconnected,
    #[error("exhaustive search limited to {max} nodes, graph has {nodes}")]
    TooLarge { nodes: usize, max: usize },
}

/// Simple undirected graph with positive node weights and edge costs.
#[derive(Debug, Clone)]
pub struct WeightedGraph<S> {
    ids: Vec<PaperId>,
    index: HashMap<PaperId, NodeIx>,
    weights: Vec<S>,
    adj: Vec<Vec<(NodeIx, S)>>,
    edge_count: usize,
}

#[derive(Debug, Clone)]
pub struct WeightedGraphBuilder<S> {
    nodes: Vec<(PaperId, S)>,
    edges: Vec<(PaperId, PaperId, S)>,
}

impl<S> Default for WeightedGraphBuilder<S> {
    fn default() -> Self {
        WeightedGraphBuilder {
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }
}

impl<S: Cost> WeightedGraphBuilder<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: impl Into<PaperId>, weight: S) -> &mut Self {
        self.nodes.push((id.into(), weight));
        self
    }

    pub fn add_edge(&mut self, u: impl Into<PaperId>, v: impl Into<PaperId>, cost: S) -> &mut Self {
        self.edges.push((u.into(), v.into(), cost));
        self
    }

    pub fn build(self) -> Result<WeightedGraph<S>, GraphError> {
        let mut nodes = self.nodes;
        nodes.sort_by(|a, b| a.0.cmp(&b.0));
        let mut index = HashMap::with_capacity(nodes.len());
        let mut ids = Vec::with_capacity(nodes.len());
        let mut weights = Vec::with_capacity(nodes.len());
        for (i, (id, w)) in nodes.into_iter().enumerate() {
            if w.partial_cmp(&S::zero()) != Some(Ordering::Greater) {
                return Err(GraphError::NonPositiveWeight(id));
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(id));
            }
            ids.push(id);
            weights.push(w);
        }
        let mut adj = vec![Vec::new(); ids.len()];
        let mut seen = BTreeSet::new();
        for (u, v, c) in self.edges {
            let iu = *index.get(&u).ok_or_else(|| GraphError::UnknownNode(u.clone()))?;
            let iv = *index.get(&v).ok_or_else(|| GraphError::UnknownNode(v.clone()))?;
            if iu == iv {
                return Err(GraphError::SelfLoop(u));
            }
            if c.partial_cmp(&S::zero()) != Some(Ordering::Greater) {
                return Err(GraphError::NonPositiveCost(u, v));
            }
            if !seen.insert((iu.min(iv), iu.max(iv))) {
                return Err(GraphError::ParallelEdge(u, v));
            }
            adj[iu].push((iv, c));
            adj[iv].push((iu, c));
        }
        for list in &mut adj {
            list.sort_by_key(|(n, _)| *n);
        }
        Ok(WeightedGraph {
            ids,
            index,
            weights,
            adj,
            edge_count: seen.len(),
        })
    }
}

impl<S: Cost> WeightedGraph<S> {
    pub fn builder() -> WeightedGraphBuilder<S> {
        WeightedGraphBuilder::new()
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Node ids in index order.
    pub fn ids(&self) -> &[PaperId] {
        &self.ids
    }

    pub fn id(&self, ix: NodeIx) -> &PaperId {
        &self.ids[ix]
    }

    pub fn index_of(&self, id: &str) -> Option<NodeIx> {
        self.index.get(id).copied()
    }

    pub fn weight(&self, ix: NodeIx) -> S {
        self.weights[ix]
    }

    pub fn node_weight_of(&self, id: &str) -> Option<S> {
        self.index_of(id).map(|i| self.weights[i])
    }

    /// Neighbors of `ix` in index order with the connecting edge cost.
    pub fn neighbors(&self, ix: NodeIx) -> &[(NodeIx, S)] {
        &self.adj[ix]
    }

    pub fn cost(&self, u: NodeIx, v: NodeIx) -> Option<S> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |(n, _)| *n).ok().map(|i| list[i].1)
    }

    pub fn edge_cost_between(&self, u: &str, v: &str) -> Option<S> {
        self.cost(self.index_of(u)?, self.index_of(v)?)
    }

    /// Every edge once as `(u, v, cost)` with `u < v`, in index order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeIx, NodeIx, S)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |(v, _)| u < *v)
                .map(move |(v, c)| (u, *v, *c))
        })
    }

    fn resolve(&self, id: &PaperId) -> Result<NodeIx, SteinerError> {
        self.index_of(id.as_str())
            .ok_or_else(|| SteinerError::UnknownNode(id.clone()))
    }

    fn resolve_terminals(&self, terminals: &[PaperId]) -> Result<Vec<NodeIx>, SteinerError> {
        if terminals.is_empty() {
            return Err(SteinerError::EmptyTerminals);
        }
        let set: BTreeSet<NodeIx> = terminals
            .iter()
            .map(|t| self.resolve(t))
            .collect::<Result<_, _>>()?;
        Ok(set.into_iter().collect())
    }
}

/// Single-source shortest paths under the node-cost-on-entry convention.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPaths<S> {
    pub source: NodeIx,
    /// `None` for unreachable nodes.
    pub dist: Vec<Option<S>>,
    pub pred: Vec<Option<NodeIx>>,
}

impl<S: Cost> ShortestPaths<S> {
    /// Node sequence `source ..= target`, or `None` if unreachable.
    pub fn path_to(&self, target: NodeIx) -> Option<Vec<NodeIx>> {
        self.dist[target]?;
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        debug_assert_eq!(cur, self.source);
        path.reverse();
        Some(path)
    }

    /// Path cost without either endpoint's weight: edge costs plus interior
    /// node weights. Symmetric in the endpoints.
    pub fn interior_cost(&self, graph: &WeightedGraph<S>, target: NodeIx) -> Option<S> {
        self.dist[target]?;
        match self.pred[target] {
            None => Some(S::zero()),
            Some(p) => {
                let c = graph.cost(p, target).expect("predecessor is adjacent");
                Some(self.dist[p].expect("predecessor reached") + c)
            }
        }
    }
}

struct HeapEntry<S> {
    cost: S,
    node: NodeIx,
}

impl<S: PartialOrd> PartialEq for HeapEntry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: PartialOrd> Eq for HeapEntry<S> {}

impl<S: PartialOrd> PartialOrd for HeapEntry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: PartialOrd> Ord for HeapEntry<S> {
    // Reversed: BinaryHeap pops the cheapest entry, lower index first on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

pub(crate) fn dijkstra<S: Cost>(graph: &WeightedGraph<S>, source: NodeIx) -> ShortestPaths<S> {
    let n = graph.node_count();
    let mut dist: Vec<Option<S>> = vec![None; n];
    let mut pred: Vec<Option<NodeIx>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(S::zero());
    heap.push(HeapEntry {
        cost: S::zero(),
        node: source,
    });
    while let Some(HeapEntry { cost, node: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(v, c) in graph.neighbors(u) {
            if done[v] {
                continue;
            }
            let candidate = cost + c + graph.weight(v);
            let improve = match dist[v] {
                None => true,
                Some(old) if candidate < old => true,
                Some(old) => {
                    // Equal distance: keep the smaller predecessor id.
                    if candidate == old && pred[v].is_some_and(|p| u < p) {
                        pred[v] = Some(u);
                    }
                    false
                }
            };
            if improve {
                dist[v] = Some(candidate);
                pred[v] = Some(u);
                heap.push(HeapEntry {
                    cost: candidate,
                    node: v,
                });
            }
        }
    }
    ShortestPaths { source, dist, pred }
}

/// Shortest paths from `source` to every node.
pub fn shortest_paths<S: Cost>(
    graph: &WeightedGraph<S>,
    source: &PaperId,
) -> Result<ShortestPaths<S>, SteinerError> {
    Ok(dijkstra(graph, graph.resolve(source)?))
}

/// Shortest-path rows keyed by source terminal.
#[derive(Debug, Clone, Default)]
pub struct PathTable<S> {
    rows: BTreeMap<NodeIx, ShortestPaths<S>>,
}

impl<S: Cost> PathTable<S> {
    pub fn compute(graph: &WeightedGraph<S>, sources: &[NodeIx]) -> Self {
        PathTable {
            rows: sources.iter().map(|&s| (s, dijkstra(graph, s))).collect(),
        }
    }

    pub fn row(&self, source: NodeIx) -> Option<&ShortestPaths<S>> {
        self.rows.get(&source)
    }
}

/// Edge of the terminal distance graph, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureEdge<S> {
    pub a: NodeIx,
    pub b: NodeIx,
    /// Entry-convention distance from `a` to `b` (includes `w(b)`).
    pub distance: S,
    /// Edge costs plus interior node weights; what the closure MST minimizes.
    pub interior: S,
}

/// Complete distance graph over the terminals of one connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureComponent<S> {
    pub terminals: Vec<NodeIx>,
    pub edges: Vec<ClosureEdge<S>>,
}

#[derive(Debug, Clone)]
pub struct MetricClosure<S> {
    pub components: Vec<ClosureComponent<S>>,
    /// Terminals that cannot reach any other terminal.
    pub isolated: Vec<NodeIx>,
    pub paths: PathTable<S>,
}

/// Distance graph over `terminals`, one complete graph per connected
/// component that holds at least two of them.
pub fn metric_closure<S: Cost>(
    graph: &WeightedGraph<S>,
    terminals: &[PaperId],
) -> Result<MetricClosure<S>, SteinerError> {
    let terms = graph.resolve_terminals(terminals)?;
    Ok(closure_of(graph, &terms))
}

fn closure_of<S: Cost>(graph: &WeightedGraph<S>, terms: &[NodeIx]) -> MetricClosure<S> {
    let paths = PathTable::compute(graph, terms);
    let mut assigned: BTreeSet<NodeIx> = BTreeSet::new();
    let mut components = Vec::new();
    let mut isolated = Vec::new();
    for &t in terms {
        if assigned.contains(&t) {
            continue;
        }
        let row = paths.row(t).expect("row per terminal");
        let group: Vec<NodeIx> = terms.iter().copied().filter(|&u| row.dist[u].is_some()).collect();
        assigned.extend(group.iter().copied());
        if group.len() == 1 {
            if terms.len() > 1 {
                isolated.push(t);
            }
            components.push(ClosureComponent {
                terminals: group,
                edges: Vec::new(),
            });
            continue;
        }
        let mut edges = Vec::new();
        for (i, &a) in group.iter().enumerate() {
            let row = paths.row(a).expect("row per terminal");
            for &b in &group[i + 1..] {
                edges.push(ClosureEdge {
                    a,
                    b,
                    distance: row.dist[b].expect("same component"),
                    interior: row.interior_cost(graph, b).expect("same component"),
                });
            }
        }
        components.push(ClosureComponent {
            terminals: group,
            edges,
        });
    }
    MetricClosure {
        components,
        isolated,
        paths,
    }
}

/// Kruskal over `nodes` with ties broken by `(cost, smaller id, larger id)`.
/// Fails when the edges do not connect every node.
pub fn kruskal<S: Cost>(
    nodes: &[NodeIx],
    edges: &[(NodeIx, NodeIx, S)],
) -> Result<Vec<(NodeIx, NodeIx, S)>, SteinerError> {
    let local: HashMap<NodeIx, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut sorted: Vec<(NodeIx, NodeIx, S)> = edges
        .iter()
        .map(|&(u, v, c)| (u.min(v), u.max(v), c))
        .collect();
    sorted.sort_by(|x, y| {
        x.2.partial_cmp(&y.2)
            .unwrap_or(Ordering::Equal)
            .then_with(|| (x.0, x.1).cmp(&(y.0, y.1)))
    });
    let mut dsu = DisjointSet::new(nodes.len());
    let mut tree = Vec::with_capacity(nodes.len().saturating_sub(1));
    for (u, v, c) in sorted {
        let (Some(&lu), Some(&lv)) = (local.get(&u), local.get(&v)) else {
            continue;
        };
        if dsu.union(lu, lv) {
            tree.push((u, v, c));
        }
    }
    if tree.len() + 1 < nodes.len() {
        return Err(SteinerError::Disconnected);
    }
    Ok(tree)
}

/// Minimum spanning tree of the whole graph (edge costs only).
pub fn minimum_spanning_tree<S: Cost>(
    graph: &WeightedGraph<S>,
) -> Result<Vec<(PaperId, PaperId, S)>, SteinerError> {
    let nodes: Vec<NodeIx> = (0..graph.node_count()).collect();
    let edges: Vec<_> = graph.edges().collect();
    Ok(kruskal(&nodes, &edges)?
        .into_iter()
        .map(|(u, v, c)| (graph.id(u).clone(), graph.id(v).clone(), c))
        .collect())
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Node and edge sets over graph indices; edges stored as `(min, max)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subtree {
    pub nodes: BTreeSet<NodeIx>,
    pub edges: BTreeSet<(NodeIx, NodeIx)>,
}

impl Subtree {
    pub fn insert_edge(&mut self, u: NodeIx, v: NodeIx) {
        self.nodes.insert(u);
        self.nodes.insert(v);
        self.edges.insert((u.min(v), u.max(v)));
    }

    pub fn degree(&self) -> BTreeMap<NodeIx, usize> {
        let mut deg: BTreeMap<NodeIx, usize> = self.nodes.iter().map(|&n| (n, 0)).collect();
        for &(u, v) in &self.edges {
            *deg.get_mut(&u).expect("edge endpoint is a node") += 1;
            *deg.get_mut(&v).expect("edge endpoint is a node") += 1;
        }
        deg
    }

    /// Nodes of degree at most one.
    pub fn leaf_count(&self) -> usize {
        self.degree().values().filter(|&&d| d <= 1).count()
    }

    /// True when the edge set has no cycle.
    pub fn is_forest(&self) -> bool {
        let local: HashMap<NodeIx, usize> = self.nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut dsu = DisjointSet::new(self.nodes.len());
        self.edges.iter().all(|(u, v)| dsu.union(local[u], local[v]))
    }

    /// Repeatedly removes leaves that are not terminals.
    pub fn prune_nonterminal_leaves(&mut self, terminals: &BTreeSet<NodeIx>) {
        loop {
            let deg = self.degree();
            let doomed: Vec<NodeIx> = deg
                .iter()
                .filter(|(n, d)| **d <= 1 && !terminals.contains(n))
                .map(|(n, _)| *n)
                .collect();
            if doomed.is_empty() {
                return;
            }
            for n in doomed {
                self.nodes.remove(&n);
                self.edges.retain(|&(u, v)| u != n && v != n);
            }
        }
    }
}

/// Union of the shortest paths behind each closure MST edge.
pub fn expand_tree<S: Cost>(closure_mst: &[(NodeIx, NodeIx, S)], paths: &PathTable<S>) -> Subtree {
    let mut out = Subtree::default();
    for &(a, b, _) in closure_mst {
        let (row, target) = match paths.row(a) {
            Some(row) => (row, b),
            None => (paths.row(b).expect("row for closure endpoint"), a),
        };
        let path = row.path_to(target).expect("closure edge has a recorded path");
        for w in path.windows(2) {
            out.insert_edge(w[0], w[1]);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeEdge<S> {
    pub a: PaperId,
    pub b: PaperId,
    pub cost: S,
}

/// Solution of one Steiner instance; a forest when terminals span several
/// components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinerTree<S> {
    pub nodes: Vec<PaperId>,
    pub edges: Vec<TreeEdge<S>>,
    pub terminals: Vec<PaperId>,
    /// Edge costs plus node weights of everything in the tree.
    pub total_cost: S,
    /// Number of trees in the forest.
    pub components: usize,
    /// Terminals that could not be connected to any other terminal.
    pub isolated_terminals: Vec<PaperId>,
}

impl<S: Cost> SteinerTree<S> {
    pub(crate) fn from_subtree(
        graph: &WeightedGraph<S>,
        shape: &Subtree,
        terminals: &[NodeIx],
        components: usize,
        isolated: &[NodeIx],
    ) -> Self {
        let edges: Vec<TreeEdge<S>> = shape
            .edges
            .iter()
            .map(|&(u, v)| TreeEdge {
                a: graph.id(u).clone(),
                b: graph.id(v).clone(),
                cost: graph.cost(u, v).expect("tree edge exists in graph"),
            })
            .collect();
        let nodes: Vec<PaperId> = shape.nodes.iter().map(|&n| graph.id(n).clone()).collect();
        let mut tree = SteinerTree {
            nodes,
            edges,
            terminals: terminals.iter().map(|&t| graph.id(t).clone()).collect(),
            total_cost: S::zero(),
            components,
            isolated_terminals: isolated.iter().map(|&t| graph.id(t).clone()).collect(),
        };
        tree.total_cost = tree.recompute_cost(graph);
        tree
    }

    /// Sum of stored edge costs (edge order) then node weights (node order).
    pub fn recompute_cost(&self, graph: &WeightedGraph<S>) -> S {
        let edges = self.edges.iter().fold(S::zero(), |acc, e| acc + e.cost);
        self.nodes.iter().fold(edges, |acc, n| {
            acc + graph.node_weight_of(n.as_str()).expect("tree node exists in graph")
        })
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.binary_search_by(|n| n.as_str().cmp(id)).is_ok()
    }

    /// Nodes of degree at most one.
    pub fn leaf_count(&self) -> usize {
        let mut deg: BTreeMap<&PaperId, usize> = self.nodes.iter().map(|n| (n, 0)).collect();
        for e in &self.edges {
            *deg.entry(&e.a).or_default() += 1;
            *deg.entry(&e.b).or_default() += 1;
        }
        deg.values().filter(|&&d| d <= 1).count()
    }
}

/// Heuristic node-edge weighted Steiner tree spanning `terminals`.
pub fn newst<S: Cost>(
    graph: &WeightedGraph<S>,
    terminals: &[PaperId],
) -> Result<SteinerTree<S>, SteinerError> {
    let terms = graph.resolve_terminals(terminals)?;
    let closure = closure_of(graph, &terms);
    let term_set: BTreeSet<NodeIx> = terms.iter().copied().collect();
    let mut forest = Subtree::default();
    for component in &closure.components {
        if component.terminals.len() == 1 {
            forest.nodes.insert(component.terminals[0]);
            continue;
        }
        let closure_edges: Vec<_> = component
            .edges
            .iter()
            .map(|e| (e.a, e.b, e.interior))
            .collect();
        let closure_mst = kruskal(&component.terminals, &closure_edges)?;
        let spliced = expand_tree(&closure_mst, &closure.paths);
        let nodes: Vec<NodeIx> = spliced.nodes.iter().copied().collect();
        let edges: Vec<_> = spliced
            .edges
            .iter()
            .map(|&(u, v)| (u, v, graph.cost(u, v).expect("spliced edge exists")))
            .collect();
        let mut tree = Subtree::default();
        for (u, v, _) in kruskal(&nodes, &edges)? {
            tree.insert_edge(u, v);
        }
        tree.prune_nonterminal_leaves(&term_set);
        forest.nodes.extend(tree.nodes);
        forest.edges.extend(tree.edges);
    }
    Ok(SteinerTree::from_subtree(
        graph,
        &forest,
        &terms,
        closure.components.len(),
        &closure.isolated,
    ))
}
