//! Undirected attributed graphs and connected edge-subgraphs (graphlets).
//!
//! Nodes are dense integer ids `0..n`. Edges are unordered distinct pairs.
//! Nodes and edges may carry discrete categorical labels; continuous
//! attributes are out of scope. All types are immutable after construction
//! and safe to share across threads.

use rand::seq::index;
use rand::Rng;
use std::collections::HashSet;
use thiserror::Error;

/// Discrete label id attached to a node or an edge.
pub type Label = i32;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("edge endpoint {endpoint} out of range for {nodes} nodes")]
    EndpointOutOfRange { endpoint: u32, nodes: u32 },
    #[error("expected {expected} node labels, got {got}")]
    NodeLabelCount { expected: usize, got: usize },
    #[error("expected {expected} edge labels, got {got}")]
    EdgeLabelCount { expected: usize, got: usize },
    #[error("tau must be positive, got {0}")]
    InvalidTau(f64),
    #[error("cannot add {requested} edges: only {available} absent node pairs")]
    InsufficientAbsentPairs { requested: usize, available: usize },
}

/// Undirected graph with optional discrete node/edge labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributedGraph {
    node_count: u32,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
    node_labels: Option<Vec<Label>>,
    edge_labels: Option<Vec<Label>>,
}

/// Normalizes an unordered pair so the smaller endpoint comes first.
fn ordered(u: u32, v: u32) -> (u32, u32) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Validates and builds an [`AttributedGraph`].
///
/// Edge labels, when given, must align with `edges` position by position.
pub fn build_graph(
    node_count: u32,
    edges: &[(u32, u32)],
    node_labels: Option<Vec<Label>>,
    edge_labels: Option<Vec<Label>>,
) -> Result<AttributedGraph, GraphError> {
    let mut seen = HashSet::with_capacity(edges.len());
    let mut normalized = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for endpoint in [u, v] {
            if endpoint >= node_count {
                return Err(GraphError::EndpointOutOfRange {
                    endpoint,
                    nodes: node_count,
                });
            }
        }
        let e = ordered(u, v);
        if !seen.insert(e) {
            return Err(GraphError::DuplicateEdge(e.0, e.1));
        }
        normalized.push(e);
    }
    if let Some(labels) = &node_labels {
        if labels.len() != node_count as usize {
            return Err(GraphError::NodeLabelCount {
                expected: node_count as usize,
                got: labels.len(),
            });
        }
    }
    if let Some(labels) = &edge_labels {
        if labels.len() != normalized.len() {
            return Err(GraphError::EdgeLabelCount {
                expected: normalized.len(),
                got: labels.len(),
            });
        }
    }
    let mut adjacency = vec![Vec::new(); node_count as usize];
    for &(u, v) in &normalized {
        adjacency[u as usize].push(v);
        adjacency[v as usize].push(u);
    }
    Ok(AttributedGraph {
        node_count,
        edges: normalized,
        adjacency,
        node_labels,
        edge_labels,
    })
}

impl AttributedGraph {
    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as normalized `(min, max)` pairs, in construction order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn degree(&self, node: u32) -> usize {
        self.adjacency[node as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let (u, v) = ordered(u, v);
        self.adjacency[u as usize].contains(&v)
    }

    pub fn node_labels(&self) -> Option<&[Label]> {
        self.node_labels.as_deref()
    }

    pub fn edge_labels(&self) -> Option<&[Label]> {
        self.edge_labels.as_deref()
    }

    pub fn node_label(&self, node: u32) -> Option<Label> {
        self.node_labels.as_ref().map(|l| l[node as usize])
    }

    /// Label of edge `(u, v)` if edge labels are present.
    ///
    /// Linear in the edge count; fine for the small graphs handled here.
    pub fn edge_label(&self, u: u32, v: u32) -> Option<Label> {
        let labels = self.edge_labels.as_ref()?;
        let e = ordered(u, v);
        self.edges
            .iter()
            .position(|&known| known == e)
            .map(|i| labels[i])
    }

    /// True iff one connected component covers all nodes.
    ///
    /// The empty graph and the single node count as connected by convention.
    pub fn is_connected(&self) -> bool {
        connected_over(self.node_count as usize, |u| {
            self.adjacency[u].iter().map(|&v| v as usize)
        })
    }

    /// Non-decreasing list of node degrees; sums to `2|E|`.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degrees: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        degrees.sort_unstable();
        degrees
    }
}

/// BFS connectivity over nodes `0..n` with a caller-supplied neighbor view.
fn connected_over<I, F>(n: usize, neighbors: F) -> bool
where
    I: Iterator<Item = usize>,
    F: Fn(usize) -> I,
{
    if n <= 1 {
        return true;
    }
    let mut visited = vec![false; n];
    let mut queue = vec![0usize];
    visited[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop() {
        for v in neighbors(u) {
            if !visited[v] {
                visited[v] = true;
                reached += 1;
                queue.push(v);
            }
        }
    }
    reached == n
}

/// Connected edge-subgraph `(U_t, A_t)` of a parent [`AttributedGraph`].
///
/// Nodes keep their parent ids; labels are copied from the parent at
/// construction so a graphlet stays meaningful on its own. The 0-edge
/// singleton (one node, no edges) is allowed as the degenerate order-0 case.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graphlet {
    nodes: Vec<u32>,
    edges: Vec<(u32, u32)>,
    node_labels: Option<Vec<Label>>,
    edge_labels: Option<Vec<Label>>,
}

impl Graphlet {
    /// Builds a graphlet from a subset of parent edges.
    ///
    /// The node set is exactly the set of endpoints, so every node is
    /// incident to at least one edge. Connectivity is not checked here;
    /// callers that need it use [`Graphlet::is_connected`].
    pub fn from_edges(parent: &AttributedGraph, edges: &[(u32, u32)]) -> Graphlet {
        let mut normalized: Vec<(u32, u32)> = edges.iter().map(|&(u, v)| ordered(u, v)).collect();
        normalized.sort_unstable();
        let mut nodes: Vec<u32> = normalized.iter().flat_map(|&(u, v)| [u, v]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        let node_labels = parent
            .node_labels()
            .map(|labels| nodes.iter().map(|&u| labels[u as usize]).collect());
        let edge_labels = parent.edge_labels().map(|_| {
            normalized
                .iter()
                .map(|&(u, v)| parent.edge_label(u, v).expect("edge from parent"))
                .collect()
        });
        Graphlet {
            nodes,
            edges: normalized,
            node_labels,
            edge_labels,
        }
    }

    /// Degenerate order-0 graphlet: a single node, no edges.
    pub fn singleton(parent: &AttributedGraph, node: u32) -> Graphlet {
        Graphlet {
            nodes: vec![node],
            edges: Vec::new(),
            node_labels: parent.node_label(node).map(|l| vec![l]),
            edge_labels: parent.edge_labels().map(|_| Vec::new()),
        }
    }

    /// Parent node ids spanned by the edge set, ascending.
    pub fn nodes(&self) -> &[u32] {
        &self.nodes
    }

    /// Normalized `(min, max)` edges, ascending.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Edge count; the graphlet "order" throughout this crate.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_labels(&self) -> Option<&[Label]> {
        self.node_labels.as_deref()
    }

    pub fn edge_labels(&self) -> Option<&[Label]> {
        self.edge_labels.as_deref()
    }

    /// Local index of a parent node id within [`Graphlet::nodes`].
    pub fn local_index(&self, node: u32) -> usize {
        self.nodes.binary_search(&node).expect("node in graphlet")
    }

    /// Adjacency over local indices `0..node_count()` as bitmasks.
    ///
    /// Graphlets never exceed `T + 1 ≤ 11` nodes, so a `u16` mask per node
    /// suffices and keeps the measure computations allocation-light.
    pub fn local_adjacency(&self) -> Vec<u16> {
        let mut adjacency = vec![0u16; self.nodes.len()];
        for &(u, v) in &self.edges {
            let (i, j) = (self.local_index(u), self.local_index(v));
            adjacency[i] |= 1 << j;
            adjacency[j] |= 1 << i;
        }
        adjacency
    }

    pub fn is_connected(&self) -> bool {
        let adjacency = self.local_adjacency();
        connected_over(self.nodes.len(), |u| {
            let mask = adjacency[u];
            (0..self.nodes.len()).filter(move |&v| mask & (1 << v) != 0)
        })
    }
}

/// Rounds half-up: the convention for perturbation edge counts.
fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Randomly deletes or adds edges to reach roughly `tau * |E|` edges.
///
/// `tau < 1` deletes `round((1 - tau)|E|)` uniformly chosen edges; `tau > 1`
/// adds `round((tau - 1)|E|)` uniformly chosen absent pairs; `tau = 1`
/// returns an unchanged copy. Node labels are preserved; edge labels are
/// dropped because added structure has no meaningful label (deletion-only
/// perturbations keep the surviving labels). Connectivity of the result is
/// not enforced; the sampler tolerates disconnected inputs.
///
/// Deterministic for a fixed `(g, tau, rng seed)`.
pub fn perturb_edges<R: Rng>(
    g: &AttributedGraph,
    tau: f64,
    rng: &mut R,
) -> Result<AttributedGraph, GraphError> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(GraphError::InvalidTau(tau));
    }
    let m = g.edge_count();
    if (tau - 1.0).abs() < 1e-12 {
        return Ok(g.clone());
    }
    if tau < 1.0 {
        let delete = round_half_up((1.0 - tau) * m as f64).min(m);
        let keep: HashSet<usize> = {
            let doomed: HashSet<usize> = index::sample(rng, m, delete).into_iter().collect();
            (0..m).filter(|i| !doomed.contains(i)).collect()
        };
        let edges: Vec<(u32, u32)> = g
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| keep.contains(i))
            .map(|(_, &e)| e)
            .collect();
        let edge_labels = g.edge_labels.as_ref().map(|labels| {
            labels
                .iter()
                .enumerate()
                .filter(|(i, _)| keep.contains(i))
                .map(|(_, &l)| l)
                .collect()
        });
        build_graph(g.node_count, &edges, g.node_labels.clone(), edge_labels)
    } else {
        let add = round_half_up((tau - 1.0) * m as f64);
        let mut absent = Vec::new();
        for u in 0..g.node_count {
            for v in (u + 1)..g.node_count {
                if !g.has_edge(u, v) {
                    absent.push((u, v));
                }
            }
        }
        if add > absent.len() {
            return Err(GraphError::InsufficientAbsentPairs {
                requested: add,
                available: absent.len(),
            });
        }
        let mut edges = g.edges.clone();
        for i in index::sample(rng, absent.len(), add) {
            edges.push(absent[i]);
        }
        // labels on added structure are undefined, so edge labels are dropped
        build_graph(g.node_count, &edges, g.node_labels.clone(), None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> AttributedGraph {
        build_graph(3, &[(0, 1), (1, 2), (0, 2)], None, None).unwrap()
    }

    #[test]
    fn builds_triangle() {
        let g = triangle();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree_sequence(), vec![2, 2, 2]);
    }

    #[test]
    fn builds_single_edge() {
        let g = build_graph(2, &[(0, 1)], None, None).unwrap();
        assert_eq!(g.degree_sequence(), vec![1, 1]);
    }

    #[test]
    fn rejects_self_loop() {
        assert_eq!(
            build_graph(3, &[(0, 0)], None, None),
            Err(GraphError::SelfLoop(0))
        );
    }

    #[test]
    fn rejects_duplicate_edge_in_either_direction() {
        assert_eq!(
            build_graph(3, &[(0, 1), (1, 0)], None, None),
            Err(GraphError::DuplicateEdge(0, 1))
        );
    }

    #[test]
    fn rejects_out_of_range_endpoint() {
        assert_eq!(
            build_graph(2, &[(0, 5)], None, None),
            Err(GraphError::EndpointOutOfRange {
                endpoint: 5,
                nodes: 2
            })
        );
    }

    #[test]
    fn rejects_label_count_mismatch() {
        assert!(matches!(
            build_graph(3, &[(0, 1)], Some(vec![1, 2]), None),
            Err(GraphError::NodeLabelCount { .. })
        ));
        assert!(matches!(
            build_graph(3, &[(0, 1)], None, Some(vec![1, 2])),
            Err(GraphError::EdgeLabelCount { .. })
        ));
    }

    #[test]
    fn connectivity_cases() {
        assert!(triangle().is_connected());
        let two_edges = build_graph(4, &[(0, 1), (2, 3)], None, None).unwrap();
        assert!(!two_edges.is_connected());
        let lone = build_graph(1, &[], None, None).unwrap();
        assert!(lone.is_connected());
        let empty = build_graph(0, &[], None, None).unwrap();
        assert!(empty.is_connected());
    }

    #[test]
    fn degree_sequence_of_path() {
        let path = build_graph(3, &[(0, 1), (1, 2)], None, None).unwrap();
        assert_eq!(path.degree_sequence(), vec![1, 1, 2]);
    }

    #[test]
    fn degree_sequence_sums_to_twice_edge_count() {
        let g = build_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)], None, None).unwrap();
        let sum: usize = g.degree_sequence().iter().sum();
        assert_eq!(sum, 2 * g.edge_count());
    }

    #[test]
    fn graphlet_spans_edge_endpoints_only() {
        let g = build_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], None, None).unwrap();
        let glet = Graphlet::from_edges(&g, &[(3, 2), (1, 2)]);
        assert_eq!(glet.nodes(), &[1, 2, 3]);
        assert_eq!(glet.edges(), &[(1, 2), (2, 3)]);
        assert!(glet.is_connected());
    }

    #[test]
    fn graphlet_copies_labels_from_parent() {
        let g = build_graph(
            3,
            &[(0, 1), (1, 2)],
            Some(vec![10, 20, 30]),
            Some(vec![-1, -2]),
        )
        .unwrap();
        let glet = Graphlet::from_edges(&g, &[(1, 2)]);
        assert_eq!(glet.node_labels(), Some(&[20, 30][..]));
        assert_eq!(glet.edge_labels(), Some(&[-2][..]));
    }

    #[test]
    fn graphlet_disconnected_subset_detected() {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], None, None).unwrap();
        let glet = Graphlet::from_edges(&g, &[(0, 1), (2, 3)]);
        assert!(!glet.is_connected());
    }

    #[test]
    fn singleton_graphlet() {
        let g = build_graph(2, &[(0, 1)], Some(vec![7, 8]), None).unwrap();
        let s = Graphlet::singleton(&g, 1);
        assert_eq!(s.node_count(), 1);
        assert_eq!(s.edge_count(), 0);
        assert_eq!(s.node_labels(), Some(&[8][..]));
        assert!(s.is_connected());
    }

    fn ten_edge_graph() -> AttributedGraph {
        let edges: Vec<(u32, u32)> = (0..10).map(|i| (i, (i + 1) % 10)).collect();
        build_graph(10, &edges, None, None).unwrap()
    }

    #[test]
    fn perturb_identity_at_tau_one() {
        let g = ten_edge_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = perturb_edges(&g, 1.0, &mut rng).unwrap();
        assert_eq!(p.edges(), g.edges());
    }

    #[test]
    fn perturb_deletes_to_subset() {
        let g = ten_edge_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = perturb_edges(&g, 0.8, &mut rng).unwrap();
        assert_eq!(p.edge_count(), 8);
        let original: HashSet<_> = g.edges().iter().collect();
        assert!(p.edges().iter().all(|e| original.contains(e)));
    }

    #[test]
    fn perturb_adds_to_superset() {
        let g = ten_edge_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = perturb_edges(&g, 1.4, &mut rng).unwrap();
        assert_eq!(p.edge_count(), 14);
        let perturbed: HashSet<_> = p.edges().iter().collect();
        assert!(g.edges().iter().all(|e| perturbed.contains(e)));
    }

    #[test]
    fn perturb_is_deterministic_by_seed() {
        let g = ten_edge_graph();
        let a = perturb_edges(&g, 0.6, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = perturb_edges(&g, 0.6, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn perturb_rejects_nonpositive_tau() {
        let g = ten_edge_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(
            perturb_edges(&g, 0.0, &mut rng),
            Err(GraphError::InvalidTau(_))
        ));
    }

    #[test]
    fn perturb_rejects_impossible_addition() {
        let g = triangle(); // complete: no absent pairs
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(matches!(
            perturb_edges(&g, 2.0, &mut rng),
            Err(GraphError::InsufficientAbsentPairs { .. })
        ));
    }

    #[test]
    fn perturb_keeps_node_labels_and_drops_edge_labels_on_addition() {
        let g = build_graph(
            4,
            &[(0, 1), (1, 2), (2, 3)],
            Some(vec![1, 1, 2, 2]),
            Some(vec![5, 6, 7]),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let grown = perturb_edges(&g, 1.4, &mut rng).unwrap();
        assert_eq!(grown.node_labels(), Some(&[1, 1, 2, 2][..]));
        assert!(grown.edge_labels().is_none());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let shrunk = perturb_edges(&g, 0.8, &mut rng).unwrap();
        assert_eq!(shrunk.edge_labels().map(<[Label]>::len), Some(2));
    }
}
