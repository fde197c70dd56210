//! Stochastic graphlet parsing by random walk with restart, plus the
//! sample-complexity calculator that sizes the run count.
//!
//! Each of `M` runs grows one connected subgraph edge by edge: with
//! probability `alpha` the walk continues from the node it currently sits
//! on, otherwise it restarts from a uniformly chosen previously visited
//! node, and in either case it crosses a uniformly (or label-similarity)
//! chosen incident edge not yet in the subgraph. The subgraph after `t`
//! successful steps is the run's order-`t` graphlet, so a full run yields
//! one graphlet per order `1..=T`.

use crate::graph::{AttributedGraph, Graphlet};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashSet;
use thiserror::Error;

/// Largest walk order the graphlet representation supports (a `T`-edge tree
/// has `T + 1` nodes and local adjacency is a 16-bit mask per node).
pub const MAX_WALK_ORDER: usize = 15;

/// Known class counts: connected graphs with `t` edges, `t = 1..=10`.
const CONNECTED_GRAPH_COUNTS: [u64; 10] = [1, 1, 3, 5, 12, 30, 79, 227, 710, 2322];

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("run count must be at least 1")]
    ZeroRuns,
    #[error("max order must lie in 1..={MAX_WALK_ORDER}, got {0}")]
    BadOrder(usize),
    #[error("alpha must lie in [0, 1], got {0}")]
    BadAlpha(f64),
    #[error("label similarity weight must lie in (0, 1], got {0}")]
    BadLabelWeight(f64),
    #[error("class count must be at least 1")]
    ZeroClasses,
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("delta must lie strictly between 0 and 1, got {0}")]
    BadDelta(f64),
    #[error("no stored class count for order {0}; supported orders are 1..=10")]
    UnknownClassCount(usize),
}

/// Parameters of one sampling pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// Number of independent walk runs (`M`).
    pub runs: u32,
    /// Maximum graphlet order, i.e. edges per run (`T`).
    pub max_order: usize,
    /// Walk/restart tradeoff: probability of continuing from the current
    /// node instead of restarting from a visited one.
    pub alpha: f64,
    /// Base seed; each run derives its own substream, so serial and
    /// parallel execution agree.
    pub seed: u64,
    /// Optional weight in `(0, 1]` applied to neighbors whose node label
    /// differs from the expansion node's label (equal labels weigh 1).
    /// `None` or an unlabeled graph means uniform neighbor choice.
    pub label_similarity: Option<f64>,
}

impl SamplerConfig {
    /// Config with the standard `alpha = 1/2` and uniform neighbor choice.
    pub fn new(runs: u32, max_order: usize, seed: u64) -> SamplerConfig {
        SamplerConfig {
            runs,
            max_order,
            alpha: 0.5,
            seed,
            label_similarity: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> SamplerConfig {
        self.alpha = alpha;
        self
    }

    pub fn with_label_similarity(mut self, weight: f64) -> SamplerConfig {
        self.label_similarity = Some(weight);
        self
    }

    pub(crate) fn validate(&self) -> Result<(), SamplerError> {
        if self.runs == 0 {
            return Err(SamplerError::ZeroRuns);
        }
        if self.max_order == 0 || self.max_order > MAX_WALK_ORDER {
            return Err(SamplerError::BadOrder(self.max_order));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(SamplerError::BadAlpha(self.alpha));
        }
        if let Some(w) = self.label_similarity {
            if !(w > 0.0 && w <= 1.0) {
                return Err(SamplerError::BadLabelWeight(w));
            }
        }
        Ok(())
    }
}

/// Number of runs needed so each empirical class frequency at a given
/// order lands within `epsilon` of its true value with probability at
/// least `1 - delta`, for `a` isomorphism classes:
/// `M = ceil(2 (a ln 2 + ln(1/delta)) / epsilon^2)`.
pub fn sample_complexity(a: u64, epsilon: f64, delta: f64) -> Result<u64, SamplerError> {
    if a == 0 {
        return Err(SamplerError::ZeroClasses);
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(SamplerError::BadEpsilon(epsilon));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SamplerError::BadDelta(delta));
    }
    let numerator = 2.0 * (a as f64 * std::f64::consts::LN_2 + (1.0 / delta).ln());
    Ok((numerator / (epsilon * epsilon)).ceil() as u64)
}

/// Number of isomorphism classes of connected graphs with `t` edges,
/// for `t` in `1..=10`.
pub fn graph_count_with_edges(t: usize) -> Result<u64, SamplerError> {
    CONNECTED_GRAPH_COUNTS
        .get(t.wrapping_sub(1))
        .copied()
        .ok_or(SamplerError::UnknownClassCount(t))
}

/// The graphlets gathered by one sampling pass, organized per run.
///
/// Run `r`'s trajectory holds its order-1, order-2, ... graphlets in
/// order; a run that exhausted its component early has a short trajectory.
/// The order-`t` bag is the multiset of `t`-edge graphlets across runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphletSample {
    max_order: usize,
    runs: Vec<Vec<Graphlet>>,
}

impl GraphletSample {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    /// One run's nested graphlets, orders `1..=len`.
    pub fn run(&self, index: usize) -> &[Graphlet] {
        &self.runs[index]
    }

    /// All graphlets of order `t`, in run order.
    pub fn bag(&self, t: usize) -> impl Iterator<Item = &Graphlet> + '_ {
        let slot = t.wrapping_sub(1);
        self.runs.iter().filter_map(move |run| run.get(slot))
    }

    /// Number of runs that reached order `t` (the order-`t` bag size).
    pub fn bag_len(&self, t: usize) -> usize {
        let slot = t.wrapping_sub(1);
        self.runs.iter().filter(|run| run.len() > slot).count()
    }
}

/// Runs the random-walk-with-restart parser serially.
///
/// An edgeless graph yields an empty sample (every trajectory empty); it is
/// not an error. Identical `(g, cfg)` always produce identical samples.
pub fn parse_graphlets(
    g: &AttributedGraph,
    cfg: &SamplerConfig,
) -> Result<GraphletSample, SamplerError> {
    cfg.validate()?;
    let context = WalkContext::new(g, cfg);
    let runs = (0..cfg.runs)
        .map(|run_index| context.walk(run_index))
        .collect();
    Ok(GraphletSample {
        max_order: cfg.max_order,
        runs,
    })
}

/// [`parse_graphlets`] with runs spread across the rayon pool.
///
/// Trajectories are merged in run-index order, so the result is identical
/// to the serial one regardless of scheduling.
pub fn parse_graphlets_parallel(
    g: &AttributedGraph,
    cfg: &SamplerConfig,
) -> Result<GraphletSample, SamplerError> {
    cfg.validate()?;
    let context = WalkContext::new(g, cfg);
    let runs = (0..cfg.runs)
        .into_par_iter()
        .map(|run_index| context.walk(run_index))
        .collect();
    Ok(GraphletSample {
        max_order: cfg.max_order,
        runs,
    })
}

/// Immutable per-pass state shared by all runs. Exposed crate-internally so
/// the embedding layer can stream runs without materializing a full sample.
pub(crate) struct WalkContext<'a> {
    graph: &'a AttributedGraph,
    cfg: &'a SamplerConfig,
    start_candidates: Vec<u32>,
    /// Unequal-label weight, present only when weighting is active.
    label_weight: Option<f64>,
}

impl<'a> WalkContext<'a> {
    pub(crate) fn new(g: &'a AttributedGraph, cfg: &'a SamplerConfig) -> WalkContext<'a> {
        let start_candidates = (0..g.node_count()).filter(|&v| g.degree(v) > 0).collect();
        let label_weight = match cfg.label_similarity {
            Some(w) if g.node_labels().is_some() && w < 1.0 => Some(w),
            _ => None,
        };
        WalkContext {
            graph: g,
            cfg,
            start_candidates,
            label_weight,
        }
    }

    /// One full run: grows a subgraph for up to `max_order` steps and
    /// snapshots it after every successful step.
    pub(crate) fn walk(&self, run_index: u32) -> Vec<Graphlet> {
        if self.start_candidates.is_empty() {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(1 + u64::from(run_index));

        let start = *self
            .start_candidates
            .choose(&mut rng)
            .expect("non-empty start candidates");
        let mut visited: Vec<u32> = vec![start];
        let mut visited_set: HashSet<u32> = HashSet::from([start]);
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(self.cfg.max_order);
        let mut edge_set: HashSet<(u32, u32)> = HashSet::with_capacity(self.cfg.max_order);
        let mut current = start;
        let mut trajectory = Vec::with_capacity(self.cfg.max_order);

        for _ in 0..self.cfg.max_order {
            let mut expansion = if rng.gen_bool(self.cfg.alpha) {
                current
            } else {
                *visited.choose(&mut rng).expect("visited never empty")
            };
            if self.unused_neighbors(expansion, &edge_set).is_empty() {
                // The chosen node is saturated; fall back to any visited
                // node that can still grow the subgraph, or stop the run.
                let open: Vec<u32> = visited
                    .iter()
                    .copied()
                    .filter(|&v| !self.unused_neighbors(v, &edge_set).is_empty())
                    .collect();
                match open.choose(&mut rng) {
                    Some(&v) => expansion = v,
                    None => break,
                }
            }
            let next = self.pick_neighbor(expansion, &edge_set, &mut rng);
            edge_set.insert(normalize(expansion, next));
            edges.push(normalize(expansion, next));
            if visited_set.insert(next) {
                visited.push(next);
            }
            current = next;
            trajectory.push(Graphlet::from_edges(self.graph, &edges));
        }
        trajectory
    }

    fn unused_neighbors(&self, node: u32, edge_set: &HashSet<(u32, u32)>) -> Vec<u32> {
        self.graph
            .neighbors(node)
            .iter()
            .copied()
            .filter(|&v| !edge_set.contains(&normalize(node, v)))
            .collect()
    }

    fn pick_neighbor(
        &self,
        node: u32,
        edge_set: &HashSet<(u32, u32)>,
        rng: &mut ChaCha8Rng,
    ) -> u32 {
        let candidates = self.unused_neighbors(node, edge_set);
        debug_assert!(!candidates.is_empty());
        if let (Some(w), Some(labels)) = (self.label_weight, self.graph.node_labels()) {
            let own = labels[node as usize];
            let weights: Vec<f64> = candidates
                .iter()
                .map(|&v| if labels[v as usize] == own { 1.0 } else { w })
                .collect();
            let dist = WeightedIndex::new(&weights).expect("positive weights");
            candidates[dist.sample(rng)]
        } else {
            *candidates.choose(rng).expect("non-empty candidates")
        }
    }
}

fn normalize(u: u32, v: u32) -> (u32, u32) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}
