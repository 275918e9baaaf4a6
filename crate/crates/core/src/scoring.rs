//! PageRank importance, venue scores and the two cost functions that turn a
//! citation subgraph into a node-edge weighted graph.
//!
//! Edge cost: `c(i, j) = alpha / con(i, j)^beta`, where `con` is the number of
//! times one paper mentions the other. Node weight:
//! `w(i) = gamma / (a * pgscore(i) + b * venue(i))`. Frequently co-mentioned
//! pairs and important papers are cheap, so a minimum-cost tree prefers them.

use std::collections::BTreeMap;

use std::fmt::Debug;

use num_traits::{Float, NumCast};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CitationGraph, VenueTable};
use crate::ids::PaperId;
use crate::steiner::{GraphError, WeightedGraph, WeightedGraphBuilder};

/// Floating-point scalar for scores and costs (`f32` or `f64`).
pub trait Scalar: Float + Debug + Send + Sync {}

impl<T: Float + Debug + Send + Sync> Scalar for T {}

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("PageRank of an empty graph")]
    EmptyGraph,
    #[error("all raw scores are zero")]
    AllZero,
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: &'static str },
    #[error("node weight denominator is not positive")]
    ZeroDenominator,
    #[error("mention count must be at least 1, got {0}")]
    InvalidMentions(u32),
    #[error("no score for paper {0}")]
    MissingScore(PaperId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Constants of the cost functions plus PageRank settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScoreParams<F> {
    pub alpha: F,
    pub beta: F,
    pub gamma: F,
    pub a: F,
    pub b: F,
    pub damping: F,
    pub pr_tolerance: F,
    pub pr_max_iters: usize,
    /// Lower clamp for normalized PageRank so node weights stay finite.
    pub epsilon_floor: F,
    /// Venue score for papers whose venue is missing or not in the table.
    pub missing_venue: F,
}

fn lit<F: Scalar>(x: f64) -> F {
    <F as NumCast>::from(x).expect("literal fits scalar type")
}

impl<F: Scalar> Default for ScoreParams<F> {
    fn default() -> Self {
        ScoreParams {
            alpha: lit(3.0),
            beta: lit(2.0),
            gamma: lit(5.0),
            a: lit(0.7),
            b: lit(0.3),
            damping: lit(0.85),
            pr_tolerance: lit(1e-8),
            pr_max_iters: 100,
            epsilon_floor: lit(1e-4),
            missing_venue: lit(0.1),
        }
    }
}

impl<F: Scalar> ScoreParams<F> {
    pub fn validate(&self) -> Result<(), ScoringError> {
        let positive = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("a", self.a),
            ("b", self.b),
            ("pr_tolerance", self.pr_tolerance),
            ("epsilon_floor", self.epsilon_floor),
        ];
        for (name, v) in positive {
            if !(v > F::zero() && v.is_finite()) {
                return Err(ScoringError::InvalidParam {
                    name,
                    reason: "must be positive and finite",
                });
            }
        }
        if !(self.damping > F::zero() && self.damping < F::one()) {
            return Err(ScoringError::InvalidParam {
                name: "damping",
                reason: "must lie in (0, 1)",
            });
        }
        if self.pr_max_iters == 0 {
            return Err(ScoringError::InvalidParam {
                name: "pr_max_iters",
                reason: "must be positive",
            });
        }
        if !(self.missing_venue >= F::zero() && self.missing_venue <= F::one()) {
            return Err(ScoringError::InvalidParam {
                name: "missing_venue",
                reason: "must lie in [0, 1]",
            });
        }
        Ok(())
    }
}

/// Raw PageRank over citation edges: rank flows from citing to cited paper,
/// dangling papers spread their mass uniformly. Iterates until the L1 change
/// drops below `pr_tolerance` or `pr_max_iters` is reached. Scores sum to 1.
pub fn pagerank<F: Scalar>(
    graph: &CitationGraph,
    params: &ScoreParams<F>,
) -> Result<BTreeMap<PaperId, F>, ScoringError> {
    if graph.is_empty() {
        return Err(ScoringError::EmptyGraph);
    }
    let ids: Vec<&PaperId> = graph.ids().collect();
    let index: BTreeMap<&PaperId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let out: Vec<Vec<usize>> = ids
        .iter()
        .map(|id| graph.references(id.as_str()).iter().map(|c| index[&c.id]).collect())
        .collect();

    let n = ids.len();
    let n_f: F = lit(n as f64);
    let d = params.damping;
    let teleport = (F::one() - d) / n_f;
    let mut rank = vec![F::one() / n_f; n];
    let mut next = vec![F::zero(); n];
    for _ in 0..params.pr_max_iters {
        let dangling: F = out
            .iter()
            .zip(&rank)
            .filter(|(o, _)| o.is_empty())
            .fold(F::zero(), |acc, (_, r)| acc + *r);
        let base = teleport + d * dangling / n_f;
        next.iter_mut().for_each(|x| *x = base);
        for (i, targets) in out.iter().enumerate() {
            if targets.is_empty() {
                continue;
            }
            let share = d * rank[i] / lit(targets.len() as f64);
            for &j in targets {
                next[j] = next[j] + share;
            }
        }
        let change = rank
            .iter()
            .zip(&next)
            .fold(F::zero(), |acc, (a, b)| acc + (*a - *b).abs());
        std::mem::swap(&mut rank, &mut next);
        if change < params.pr_tolerance {
            break;
        }
    }
    let total = rank.iter().fold(F::zero(), |acc, r| acc + *r);
    Ok(ids
        .into_iter()
        .zip(rank)
        .map(|(id, r)| (id.clone(), r / total))
        .collect())
}

/// Divides by the maximum score and clamps from below at `epsilon_floor`.
pub fn normalize_pgscore<F: Scalar>(
    raw: &BTreeMap<PaperId, F>,
    epsilon_floor: F,
) -> Result<BTreeMap<PaperId, F>, ScoringError> {
    let max = raw.values().fold(F::zero(), |m, v| m.max(*v));
    if max <= F::zero() {
        return Err(ScoringError::AllZero);
    }
    Ok(raw
        .iter()
        .map(|(k, v)| (k.clone(), (*v / max).max(epsilon_floor)))
        .collect())
}

/// `gamma / (a * pgscore + b * venue)`.
pub fn node_weight<F: Scalar>(params: &ScoreParams<F>, pgscore: F, venue: F) -> Result<F, ScoringError> {
    let denom = params.a * pgscore + params.b * venue;
    if denom.is_nan() || denom <= F::zero() {
        return Err(ScoringError::ZeroDenominator);
    }
    Ok(params.gamma / denom)
}

/// `alpha / con^beta`.
pub fn edge_cost<F: Scalar>(params: &ScoreParams<F>, con: u32) -> Result<F, ScoringError> {
    if con < 1 {
        return Err(ScoringError::InvalidMentions(con));
    }
    let con: F = lit(con as f64);
    Ok(params.alpha / con.powf(params.beta))
}

/// Per-paper importance: normalized PageRank, venue score and their
/// combination `a * pgscore + b * venue`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeScores<F> {
    pub raw_pagerank: BTreeMap<PaperId, F>,
    pub pgscore: BTreeMap<PaperId, F>,
    pub venue: BTreeMap<PaperId, F>,
    pub combined: BTreeMap<PaperId, F>,
}

impl<F: Scalar> NodeScores<F> {
    /// Scores every paper of `graph`. PageRank is computed over the whole
    /// graph; restrict later with [`NodeScores::restrict`].
    pub fn compute(
        graph: &CitationGraph,
        venues: &VenueTable,
        params: &ScoreParams<F>,
    ) -> Result<Self, ScoringError> {
        params.validate()?;
        let raw_pagerank = pagerank(graph, params)?;
        let pgscore = normalize_pgscore(&raw_pagerank, params.epsilon_floor)?;
        let venue: BTreeMap<PaperId, F> = graph
            .papers()
            .map(|p| {
                let v = p
                    .venue
                    .as_deref()
                    .and_then(|k| venues.score(k))
                    .map(lit::<F>)
                    .unwrap_or(params.missing_venue);
                (p.id.clone(), v)
            })
            .collect();
        let combined = pgscore
            .iter()
            .map(|(id, pg)| (id.clone(), params.a * *pg + params.b * venue[id]))
            .collect();
        Ok(NodeScores {
            raw_pagerank,
            pgscore,
            venue,
            combined,
        })
    }

    /// Scores of the papers present in `subgraph` only.
    pub fn restrict(&self, subgraph: &CitationGraph) -> Self {
        let pick = |m: &BTreeMap<PaperId, F>| {
            subgraph
                .ids()
                .filter_map(|id| m.get(id).map(|v| (id.clone(), *v)))
                .collect()
        };
        NodeScores {
            raw_pagerank: pick(&self.raw_pagerank),
            pgscore: pick(&self.pgscore),
            venue: pick(&self.venue),
            combined: pick(&self.combined),
        }
    }

    pub fn combined(&self, id: &str) -> Option<F> {
        self.combined.get(id).copied()
    }

    /// `ids` sorted by combined score descending, ties by id.
    pub fn rank_by_combined<'a>(&self, ids: impl IntoIterator<Item = &'a PaperId>) -> Vec<PaperId> {
        rank_desc(ids, &self.combined)
    }

    /// `ids` sorted by raw PageRank descending, ties by id.
    pub fn rank_by_pagerank<'a>(&self, ids: impl IntoIterator<Item = &'a PaperId>) -> Vec<PaperId> {
        rank_desc(ids, &self.raw_pagerank)
    }
}

fn rank_desc<'a, F: Scalar>(
    ids: impl IntoIterator<Item = &'a PaperId>,
    scores: &BTreeMap<PaperId, F>,
) -> Vec<PaperId> {
    let mut v: Vec<(&PaperId, F)> = ids
        .into_iter()
        .map(|id| (id, scores.get(id).copied().unwrap_or_else(F::neg_infinity)))
        .collect();
    v.sort_by(|(ia, sa), (ib, sb)| {
        sb.partial_cmp(sa)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| ia.cmp(ib))
    });
    v.dedup_by(|a, b| a.0 == b.0);
    v.into_iter().map(|(id, _)| id.clone()).collect()
}

/// Replaces a cost term by a constant, for ablations that drop node or edge
/// weights from the objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightOverride<F> {
    pub uniform_node_weight: Option<F>,
    pub uniform_edge_cost: Option<F>,
}

impl<F> Default for WeightOverride<F> {
    fn default() -> Self {
        WeightOverride {
            uniform_node_weight: None,
            uniform_edge_cost: None,
        }
    }
}

/// Undirected weighted graph over `subgraph`: each citation pair becomes one
/// edge whose `con` is the mention count summed over both directions.
pub fn build_weighted_graph<F: Scalar>(
    subgraph: &CitationGraph,
    scores: &NodeScores<F>,
    params: &ScoreParams<F>,
) -> Result<WeightedGraph<F>, ScoringError> {
    build_weighted_graph_with(subgraph, scores, params, WeightOverride::default())
}

pub fn build_weighted_graph_with<F: Scalar>(
    subgraph: &CitationGraph,
    scores: &NodeScores<F>,
    params: &ScoreParams<F>,
    overrides: WeightOverride<F>,
) -> Result<WeightedGraph<F>, ScoringError> {
    let mut builder = WeightedGraphBuilder::new();
    for id in subgraph.ids() {
        let weight = match overrides.uniform_node_weight {
            Some(w) => w,
            None => {
                let missing = || ScoringError::MissingScore(id.clone());
                let pg = *scores.pgscore.get(id).ok_or_else(missing)?;
                let venue = *scores.venue.get(id).ok_or_else(missing)?;
                node_weight(params, pg, venue)?
            }
        };
        builder.add_node(id.clone(), weight);
    }
    let mut con: BTreeMap<(&PaperId, &PaperId), u32> = BTreeMap::new();
    for (src, dst, mentions) in subgraph.edges() {
        let key = if src < dst { (src, dst) } else { (dst, src) };
        *con.entry(key).or_insert(0) += mentions;
    }
    for ((u, v), c) in con {
        let cost = match overrides.uniform_edge_cost {
            Some(c) => c,
            None => edge_cost(params, c)?,
        };
        builder.add_edge(u.clone(), v.clone(), cost);
    }
    Ok(builder.build()?)
}

/// Mention count between two papers summed over both citation directions.
pub fn con(graph: &CitationGraph, u: &str, v: &str) -> u32 {
    graph.mentions(u, v).unwrap_or(0) + graph.mentions(v, u).unwrap_or(0)
}
