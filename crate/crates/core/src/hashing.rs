//! Topological hash functions over graphlets, permutation-invariant code
//! construction, and collision-rate evaluation.
//!
//! A hash code is the sorted vector of a per-node structural measure
//! (degree, betweenness, core number, or local clustering), computed in
//! exact rational arithmetic so equality is bit-stable. Sorting erases the
//! node order, which makes codes invariant under relabeling; codes of
//! isomorphic graphlets therefore always agree, while distinct structures
//! collide only rarely (the measured rates live in [`collision_rate`]).

use crate::graph::{Graphlet, Label};
use crate::iso::CanonicalForm;
use crate::rational::{self, format_rational, Rational};
use crate::AttributedGraph;
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Largest graphlet order the enumeration machinery supports.
pub const MAX_ENUM_ORDER: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HashError {
    #[error("graphlet is disconnected")]
    Disconnected,
    #[error("order {0} outside the supported enumeration range 1..={MAX_ENUM_ORDER}")]
    UnsupportedOrder(usize),
    #[error("empty hash function list")]
    NoFunctions,
}

/// The four per-node structural measures used as hash functions.
///
/// The variant order is the fixed tie-break order used by
/// [`select_best_hash`]: betweenness wins ties against degree, and so on.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum HashFunctionId {
    Betweenness,
    Degree,
    Core,
    Clustering,
}

impl HashFunctionId {
    /// All functions, in tie-break order.
    pub const ALL: [HashFunctionId; 4] = [
        HashFunctionId::Betweenness,
        HashFunctionId::Degree,
        HashFunctionId::Core,
        HashFunctionId::Clustering,
    ];
}

impl fmt::Display for HashFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            HashFunctionId::Betweenness => "betweenness",
            HashFunctionId::Degree => "degree",
            HashFunctionId::Core => "core",
            HashFunctionId::Clustering => "clustering",
        };
        f.write_str(name)
    }
}

impl FromStr for HashFunctionId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "betweenness" => Ok(HashFunctionId::Betweenness),
            "degree" => Ok(HashFunctionId::Degree),
            "core" => Ok(HashFunctionId::Core),
            "clustering" => Ok(HashFunctionId::Clustering),
            other => Err(format!(
                "unknown hash function {other:?}; expected betweenness, degree, core, or clustering"
            )),
        }
    }
}

/// How betweenness counts source/target pairs.
///
/// `Ordered` counts `(s, t)` and `(t, s)` separately, so the path `a-b-c`
/// scores 2 at `b`. `Unordered` halves that. `Ordered` is the calibrated
/// default used by [`hash_code`]; it reproduces the published integer codes
/// for the order-7 collision pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairConvention {
    #[default]
    Ordered,
    Unordered,
}

/// Permutation-invariant structural code of a graphlet.
///
/// Values are non-decreasing rationals in lowest terms, one per node. When
/// labels are included, the sorted node-label and edge-label multisets are
/// appended; empty multisets are omitted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HashCode {
    edge_count: usize,
    function: HashFunctionId,
    values: Vec<Rational>,
    node_label_block: Option<Vec<Label>>,
    edge_label_block: Option<Vec<Label>>,
}

impl HashCode {
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn function(&self) -> HashFunctionId {
        self.function
    }

    /// Sorted measure values, one per graphlet node.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Canonical textual form: `"t|f|v1/d1,v2/d2,...|L:n1,...|E:e1,..."`.
    ///
    /// This string is the persisted vocabulary key, so it must stay stable.
    pub fn to_key(&self) -> String {
        let values = self.values.iter().map(format_rational).join(",");
        let mut key = format!("{}|{}|{}", self.edge_count, self.function, values);
        if let Some(labels) = &self.node_label_block {
            if !labels.is_empty() {
                key.push_str("|L:");
                key.push_str(&labels.iter().join(","));
            }
        }
        if let Some(labels) = &self.edge_label_block {
            if !labels.is_empty() {
                key.push_str("|E:");
                key.push_str(&labels.iter().join(","));
            }
        }
        key
    }
}

/// Computes the hash code of a connected graphlet.
///
/// With `use_labels` on, sorted label multisets are appended when the
/// graphlet carries labels; purely topological inputs are unaffected.
pub fn hash_code(
    g: &Graphlet,
    f: HashFunctionId,
    use_labels: bool,
) -> Result<HashCode, HashError> {
    if !g.is_connected() {
        return Err(HashError::Disconnected);
    }
    let values = measure_values(&g.local_adjacency(), f, PairConvention::Ordered);
    let sorted = |labels: &[Label]| {
        let mut block = labels.to_vec();
        block.sort_unstable();
        block
    };
    let (node_label_block, edge_label_block) = if use_labels {
        (
            g.node_labels().map(sorted),
            g.edge_labels().map(sorted),
        )
    } else {
        (None, None)
    };
    Ok(HashCode {
        edge_count: g.edge_count(),
        function: f,
        values,
        node_label_block,
        edge_label_block,
    })
}

/// Sorted node degrees of a graphlet.
pub fn degree_values(g: &Graphlet) -> Vec<u32> {
    let mut degrees: Vec<u32> = g.local_adjacency().iter().map(|m| m.count_ones()).collect();
    degrees.sort_unstable();
    degrees
}

/// Sorted k-core numbers, by iterated peeling of low-degree nodes.
pub fn core_values(g: &Graphlet) -> Vec<u32> {
    let mut cores = core_numbers(&g.local_adjacency());
    cores.sort_unstable();
    cores
}

/// Sorted local clustering coefficients: triangles at `v` over
/// `C(deg(v), 2)`, with `0/0 := 0`.
pub fn clustering_values(g: &Graphlet) -> Vec<Rational> {
    let mut values = clustering_coefficients(&g.local_adjacency());
    values.sort_unstable();
    values
}

/// Sorted exact betweenness centralities under the calibrated ordered-pair
/// convention. Errors on disconnected input, where "all pairs" is ill-posed.
pub fn betweenness_values(g: &Graphlet) -> Result<Vec<Rational>, HashError> {
    betweenness_values_with(g, PairConvention::Ordered)
}

/// [`betweenness_values`] with an explicit pair-counting convention.
pub fn betweenness_values_with(
    g: &Graphlet,
    convention: PairConvention,
) -> Result<Vec<Rational>, HashError> {
    if !g.is_connected() {
        return Err(HashError::Disconnected);
    }
    let mut values = betweenness_centralities(&g.local_adjacency(), convention);
    values.sort_unstable();
    Ok(values)
}

/// Sorted measure vector over neighbor bitmasks; the shared core of all
/// public hash operations.
fn measure_values(adjacency: &[u16], f: HashFunctionId, convention: PairConvention) -> Vec<Rational> {
    let mut values = match f {
        HashFunctionId::Degree => adjacency
            .iter()
            .map(|m| rational::from_integer(m.count_ones()))
            .collect(),
        HashFunctionId::Core => core_numbers(adjacency)
            .into_iter()
            .map(rational::from_integer)
            .collect(),
        HashFunctionId::Clustering => clustering_coefficients(adjacency),
        HashFunctionId::Betweenness => betweenness_centralities(adjacency, convention),
    };
    values.sort_unstable();
    values
}

fn core_numbers(adjacency: &[u16]) -> Vec<u32> {
    let n = adjacency.len();
    let mut remaining: u16 = if n == 0 { 0 } else { (1u16 << n) - 1 };
    let mut core = vec![0u32; n];
    let mut k = 0u32;
    while remaining != 0 {
        loop {
            let mut removed_any = false;
            for v in 0..n {
                if remaining & (1 << v) != 0
                    && (adjacency[v] & remaining).count_ones() <= k
                {
                    core[v] = k;
                    remaining &= !(1 << v);
                    removed_any = true;
                }
            }
            if !removed_any {
                break;
            }
        }
        k += 1;
    }
    core
}

fn clustering_coefficients(adjacency: &[u16]) -> Vec<Rational> {
    let n = adjacency.len();
    (0..n)
        .map(|v| {
            let degree = adjacency[v].count_ones() as i128;
            let possible = degree * (degree - 1) / 2;
            if possible == 0 {
                return rational::zero();
            }
            // Each triangle at v is counted once per neighbor pair, i.e. twice.
            let mut twice_triangles: i128 = 0;
            let mut mask = adjacency[v];
            while mask != 0 {
                let u = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                twice_triangles += i128::from((adjacency[u] & adjacency[v]).count_ones());
            }
            Rational::new(twice_triangles / 2, possible)
        })
        .collect()
}

/// Exact betweenness by Brandes accumulation carried out in rationals.
///
/// For each source, a BFS records shortest-path counts and predecessors;
/// dependencies are then accumulated backwards. Each ordered pair `(s, t)`
/// contributes once; `Unordered` halves the totals afterwards.
fn betweenness_centralities(adjacency: &[u16], convention: PairConvention) -> Vec<Rational> {
    let n = adjacency.len();
    let mut centrality = vec![rational::zero(); n];
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut sigma = vec![0u64; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        dist[s] = 0;
        sigma[s] = 1;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut mask = adjacency[u];
            while mask != 0 {
                let v = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
                if dist[v] == dist[u] + 1 {
                    sigma[v] += sigma[u];
                    preds[v].push(u);
                }
            }
        }
        let mut delta = vec![rational::zero(); n];
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                let ratio = Rational::new(sigma[v] as i128, sigma[w] as i128);
                delta[v] = delta[v] + ratio * (rational::one() + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    if convention == PairConvention::Unordered {
        let half = Rational::new(1, 2);
        for value in &mut centrality {
            *value *= half;
        }
    }
    centrality
}

fn masks_of_graph(g: &AttributedGraph) -> Vec<u16> {
    let mut masks = vec![0u16; g.node_count() as usize];
    for &(u, v) in g.edges() {
        masks[u as usize] |= 1 << v;
        masks[v as usize] |= 1 << u;
    }
    masks
}

/// One representative per isomorphism class of connected graphs with
/// exactly `t` edges.
///
/// Built level by level: every connected `t`-edge graph arises from a
/// connected `(t-1)`-edge graph by adding either a chord between two
/// existing non-adjacent nodes (when the graph has a cycle edge) or a
/// pendant edge to a fresh node (when it is a tree), so extending every
/// lower representative by both move kinds and deduplicating by canonical
/// form covers every class. Output order is deterministic.
pub fn enumerate_connected_graphs(t: usize) -> Result<Vec<AttributedGraph>, HashError> {
    if t == 0 || t > MAX_ENUM_ORDER {
        return Err(HashError::UnsupportedOrder(t));
    }
    let single_edge =
        crate::graph::build_graph(2, &[(0, 1)], None, None).expect("single edge is valid");
    let mut level = vec![single_edge];
    for _ in 1..t {
        let mut seen: HashSet<CanonicalForm> = HashSet::new();
        let mut next = Vec::new();
        let mut consider = |node_count: u32, edges: Vec<(u32, u32)>| {
            let candidate = crate::graph::build_graph(node_count, &edges, None, None)
                .expect("extension of a valid graph is valid");
            let form = CanonicalForm::from_adjacency(&masks_of_graph(&candidate))
                .expect("enumerated graphs stay within the oracle bound");
            if seen.insert(form) {
                next.push(candidate);
            }
        };
        for g in &level {
            let n = g.node_count();
            for u in 0..n {
                for v in (u + 1)..n {
                    if !g.has_edge(u, v) {
                        let mut edges = g.edges().to_vec();
                        edges.push((u, v));
                        consider(n, edges);
                    }
                }
            }
            for u in 0..n {
                let mut edges = g.edges().to_vec();
                edges.push((u, n));
                consider(n + 1, edges);
            }
        }
        level = next;
    }
    Ok(level)
}

/// Collision statistics of one hash function over all non-isomorphic
/// connected graphs with `t` edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionStats {
    pub order: usize,
    pub function: HashFunctionId,
    /// Number of enumerated isomorphism classes at this order.
    pub graph_count: u64,
    /// Classes lost to hashing: class count minus distinct buckets, where
    /// bucketing merges all-zero value vectors regardless of node count.
    pub collision_count: u64,
    /// Unordered pairs of classes whose full codes are equal.
    pub pair_collision_count: u64,
    /// Unordered pairs of classes: `C(graph_count, 2)`.
    pub pair_count: u64,
    /// `collision_count / pair_count`; zero when there are no pairs.
    pub rate: f64,
}

/// Measures how often a hash function merges non-isomorphic graphs of
/// order `t` (labels off).
///
/// Class vectors are bucketed with one wrinkle: vectors that are entirely
/// zero share a bucket whatever their length, mirroring a positional
/// encoding `sum v_i * B^i` in which zeros vanish. Only clustering is
/// affected in practice (trees and triangle-free cyclic graphs both score
/// all zeros). `collision_count` is the number of classes in excess of the
/// distinct buckets; `pair_collision_count` additionally reports plain
/// equal-code pairs for inspection.
pub fn collision_rate(t: usize, f: HashFunctionId) -> Result<CollisionStats, HashError> {
    let graphs = enumerate_connected_graphs(t)?;
    let a = graphs.len() as u64;
    let mut buckets: HashSet<Option<Vec<Rational>>> = HashSet::new();
    let mut exact_groups: HashMap<Vec<Rational>, u64> = HashMap::new();
    for g in &graphs {
        let values = measure_values(&masks_of_graph(g), f, PairConvention::Ordered);
        let bucket = if values.iter().all(|v| *v == rational::zero()) {
            None
        } else {
            Some(values.clone())
        };
        buckets.insert(bucket);
        *exact_groups.entry(values).or_insert(0) += 1;
    }
    let collision_count = a - buckets.len() as u64;
    let pair_collision_count = exact_groups.values().map(|&s| s * (s - 1) / 2).sum();
    let pair_count = a * (a - 1) / 2;
    let rate = if pair_count == 0 {
        0.0
    } else {
        collision_count as f64 / pair_count as f64
    };
    Ok(CollisionStats {
        order: t,
        function: f,
        graph_count: a,
        collision_count,
        pair_collision_count,
        pair_count,
        rate,
    })
}

/// Picks the function with the fewest collisions at order `t`.
///
/// Rates at a fixed order share the denominator, so comparing raw counts is
/// exact; ties fall back to the fixed order betweenness, degree, core,
/// clustering.
pub fn select_best_hash(fs: &[HashFunctionId], t: usize) -> Result<HashFunctionId, HashError> {
    if fs.is_empty() {
        return Err(HashError::NoFunctions);
    }
    let mut best: Option<(u64, HashFunctionId)> = None;
    for &f in fs {
        let stats = collision_rate(t, f)?;
        let key = (stats.collision_count, f);
        if best.is_none_or(|current| key < current) {
            best = Some(key);
        }
    }
    Ok(best.expect("list checked non-empty").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::iso::are_isomorphic;
    use crate::rational::{from_integer, rational};
    use proptest::prelude::*;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graphlet_of(node_count: u32, edges: &[(u32, u32)]) -> Graphlet {
        let parent = build_graph(node_count, edges, None, None).unwrap();
        Graphlet::from_edges(&parent, edges)
    }

    fn integers(values: &[u32]) -> Vec<Rational> {
        values.iter().map(|&v| from_integer(v)).collect()
    }

    #[test]
    fn single_edge_degree_code() {
        let k2 = graphlet_of(2, &[(0, 1)]);
        let code = hash_code(&k2, HashFunctionId::Degree, false).unwrap();
        assert_eq!(code.edge_count(), 1);
        assert_eq!(code.values(), integers(&[1, 1]).as_slice());
        assert_eq!(code.to_key(), "1|degree|1/1,1/1");
    }

    #[test]
    fn path_betweenness_is_zero_zero_two() {
        let path = graphlet_of(3, &[(0, 1), (1, 2)]);
        assert_eq!(betweenness_values(&path).unwrap(), integers(&[0, 0, 2]));
    }

    #[test]
    fn unordered_convention_halves() {
        let path = graphlet_of(3, &[(0, 1), (1, 2)]);
        assert_eq!(
            betweenness_values_with(&path, PairConvention::Unordered).unwrap(),
            integers(&[0, 0, 1])
        );
    }

    #[test]
    fn triangle_measures() {
        let triangle = graphlet_of(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(betweenness_values(&triangle).unwrap(), integers(&[0, 0, 0]));
        assert_eq!(core_values(&triangle), vec![2, 2, 2]);
        assert_eq!(clustering_values(&triangle), integers(&[1, 1, 1]));
        assert_eq!(degree_values(&triangle), vec![2, 2, 2]);
    }

    #[test]
    fn tree_measures() {
        // A 6-node tree: star at 1 with a dangling path.
        let tree = graphlet_of(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)]);
        assert_eq!(core_values(&tree), vec![1; 6]);
        assert_eq!(clustering_values(&tree), integers(&[0; 6]));
    }

    #[test]
    fn clustering_of_square_with_diagonal() {
        let g = graphlet_of(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]);
        // Nodes 1 and 3 have degree 2 and sit in one triangle each; nodes 0
        // and 2 have degree 3 and two of their three neighbor pairs close.
        assert_eq!(
            clustering_values(&g),
            vec![rational(2, 3), rational(2, 3), rational(1, 1), rational(1, 1)]
        );
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let parent = build_graph(4, &[(0, 1), (2, 3)], None, None).unwrap();
        let split = Graphlet::from_edges(&parent, &[(0, 1), (2, 3)]);
        assert_eq!(betweenness_values(&split), Err(HashError::Disconnected));
        assert_eq!(
            hash_code(&split, HashFunctionId::Degree, false),
            Err(HashError::Disconnected)
        );
    }

    #[test]
    fn order_seven_betweenness_collision_pair() {
        // The unique order-7 betweenness collision: a 7-edge star-with-tail
        // against a 7-edge near-clique tail, both scoring [0,0,0,0,10,16,22].
        let left = graphlet_of(
            7,
            &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (3, 5), (5, 6)],
        );
        let right = graphlet_of(
            7,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (3, 4), (3, 5), (4, 6)],
        );
        assert_eq!(are_isomorphic(&left, &right), Ok(false));
        let expected = integers(&[0, 0, 0, 0, 10, 16, 22]);
        assert_eq!(betweenness_values(&left).unwrap(), expected);
        assert_eq!(betweenness_values(&right).unwrap(), expected);
        assert_eq!(
            hash_code(&left, HashFunctionId::Betweenness, false),
            hash_code(&right, HashFunctionId::Betweenness, false)
        );
    }

    #[test]
    fn order_five_degree_collision_pair() {
        // Triangle plus 2-tail vs 4-cycle plus pendant: same degree code.
        let tri_tail = graphlet_of(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]);
        let cycle_pendant = graphlet_of(5, &[(0, 1), (1, 2), (2, 3), (0, 3), (3, 4)]);
        assert_eq!(are_isomorphic(&tri_tail, &cycle_pendant), Ok(false));
        assert_eq!(degree_values(&tri_tail), vec![1, 2, 2, 2, 3]);
        assert_eq!(degree_values(&cycle_pendant), vec![1, 2, 2, 2, 3]);
        assert_eq!(
            hash_code(&tri_tail, HashFunctionId::Degree, false),
            hash_code(&cycle_pendant, HashFunctionId::Degree, false)
        );
    }

    #[test]
    fn labeled_key_appends_sorted_multisets() {
        let parent = build_graph(
            3,
            &[(0, 1), (1, 2)],
            Some(vec![5, 3, 4]),
            Some(vec![9, 2]),
        )
        .unwrap();
        let glet = Graphlet::from_edges(&parent, &[(0, 1), (1, 2)]);
        let code = hash_code(&glet, HashFunctionId::Degree, true).unwrap();
        assert_eq!(code.to_key(), "2|degree|1/1,1/1,2/1|L:3,4,5|E:2,9");
        let plain = hash_code(&glet, HashFunctionId::Degree, false).unwrap();
        assert_eq!(plain.to_key(), "2|degree|1/1,1/1,2/1");
    }

    #[test]
    fn enumeration_counts_match_known_sequence() {
        let expected = [1usize, 1, 3, 5, 12, 30, 79];
        for (t, &count) in (1..=7).zip(expected.iter()) {
            assert_eq!(enumerate_connected_graphs(t).unwrap().len(), count, "t={t}");
        }
    }

    #[test]
    fn enumeration_of_order_three_by_inspection() {
        let graphs = enumerate_connected_graphs(3).unwrap();
        assert_eq!(graphs.len(), 3);
        let triangle = graphlet_of(3, &[(0, 1), (1, 2), (0, 2)]);
        let path = graphlet_of(4, &[(0, 1), (1, 2), (2, 3)]);
        let star = graphlet_of(4, &[(0, 1), (0, 2), (0, 3)]);
        for target in [&triangle, &path, &star] {
            let hits = graphs
                .iter()
                .filter(|g| {
                    let glet = Graphlet::from_edges(g, g.edges());
                    are_isomorphic(&glet, target).unwrap()
                })
                .count();
            assert_eq!(hits, 1);
        }
    }

    #[test]
    fn enumeration_rejects_out_of_range_orders() {
        assert_eq!(
            enumerate_connected_graphs(0),
            Err(HashError::UnsupportedOrder(0))
        );
        assert_eq!(
            enumerate_connected_graphs(MAX_ENUM_ORDER + 1),
            Err(HashError::UnsupportedOrder(MAX_ENUM_ORDER + 1))
        );
    }

    #[test]
    fn collision_rate_known_cells() {
        let degree5 = collision_rate(5, HashFunctionId::Degree).unwrap();
        assert_eq!(degree5.collision_count, 2);
        assert_eq!(degree5.pair_count, 66);
        assert_eq!(format!("{:.4}", degree5.rate), "0.0303");

        let betweenness6 = collision_rate(6, HashFunctionId::Betweenness).unwrap();
        assert_eq!(betweenness6.collision_count, 0);
        assert_eq!(betweenness6.pair_count, 435);
        assert_eq!(betweenness6.rate, 0.0);

        let clustering4 = collision_rate(4, HashFunctionId::Clustering).unwrap();
        assert_eq!(clustering4.collision_count, 3);
        assert_eq!(clustering4.pair_count, 10);
        assert_eq!(format!("{:.4}", clustering4.rate), "0.3000");
    }

    #[test]
    fn collision_rate_trivial_orders_have_no_pairs() {
        let stats = collision_rate(1, HashFunctionId::Core).unwrap();
        assert_eq!(stats.graph_count, 1);
        assert_eq!(stats.pair_count, 0);
        assert_eq!(stats.rate, 0.0);
    }

    #[test]
    fn best_hash_selection() {
        assert_eq!(
            select_best_hash(&HashFunctionId::ALL, 7).unwrap(),
            HashFunctionId::Betweenness
        );
        // Betweenness and degree are both collision-free at order 3; the
        // fixed tie-break prefers betweenness even when listed last.
        let reversed = [
            HashFunctionId::Clustering,
            HashFunctionId::Core,
            HashFunctionId::Degree,
            HashFunctionId::Betweenness,
        ];
        assert_eq!(select_best_hash(&reversed, 3).unwrap(), HashFunctionId::Betweenness);
        assert_eq!(
            select_best_hash(&[HashFunctionId::Core], 4).unwrap(),
            HashFunctionId::Core
        );
        assert_eq!(select_best_hash(&[], 3), Err(HashError::NoFunctions));
    }

    #[test]
    fn function_names_round_trip() {
        for f in HashFunctionId::ALL {
            assert_eq!(f.to_string().parse::<HashFunctionId>(), Ok(f));
        }
        assert!("median".parse::<HashFunctionId>().is_err());
    }

    /// Random connected graph plus a random relabeling of it.
    fn relabeled_pair(rng: &mut ChaCha8Rng) -> (Graphlet, Graphlet) {
        let n = rng.gen_range(2..=8u32);
        let mut edges: Vec<(u32, u32)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        for u in 0..n {
            for v in (u + 1)..n {
                if !edges.contains(&(u, v)) && rng.gen_bool(0.25) {
                    edges.push((u, v));
                }
            }
        }
        let mut perm: Vec<u32> = (0..n).collect();
        perm.shuffle(rng);
        let mapped: Vec<(u32, u32)> = edges
            .iter()
            .map(|&(u, v)| (perm[u as usize], perm[v as usize]))
            .collect();
        (graphlet_of(n, &edges), graphlet_of(n, &mapped))
    }

    #[test]
    fn hash_codes_are_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
        for _ in 0..200 {
            let (g, relabeled) = relabeled_pair(&mut rng);
            for f in HashFunctionId::ALL {
                assert_eq!(
                    hash_code(&g, f, false).unwrap(),
                    hash_code(&relabeled, f, false).unwrap(),
                    "function {f} not invariant"
                );
            }
        }
    }

    proptest! {
        /// Permutation invariance as a property: a spanning tree keeps the
        /// generated graph connected, extra chords vary the structure, and
        /// an arbitrary relabeling must never change any code.
        #[test]
        fn prop_codes_survive_relabeling(
            n in 2u32..=7,
            tree_seed in any::<u64>(),
            chord_bits in any::<u32>(),
            perm_seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
            let mut edges: Vec<(u32, u32)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
            let mut bit = 0;
            for u in 0..n {
                for v in (u + 1)..n {
                    if !edges.contains(&(u, v)) && chord_bits & (1 << (bit % 32)) != 0 {
                        edges.push((u, v));
                    }
                    bit += 1;
                }
            }
            let mut perm: Vec<u32> = (0..n).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
            let mapped: Vec<(u32, u32)> = edges
                .iter()
                .map(|&(u, v)| (perm[u as usize], perm[v as usize]))
                .collect();
            let g = graphlet_of(n, &edges);
            let relabeled = graphlet_of(n, &mapped);
            for f in HashFunctionId::ALL {
                prop_assert_eq!(
                    hash_code(&g, f, false).unwrap(),
                    hash_code(&relabeled, f, false).unwrap()
                );
            }
        }
    }
}
