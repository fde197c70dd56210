//! Exact isomorphism machinery for small graphs: canonical forms,
//! a direct bijection search, and an exhaustive graphlet census.
//!
//! Everything here is brute force on purpose. These routines are the ground
//! truth that the fast hashing layer is judged against, so they favor
//! obviously-correct exhaustion over clever refinement. Graphlets are
//! bounded by eleven nodes (ten edges plus one), which keeps the
//! permutation search tractable.

use crate::graph::{AttributedGraph, Graphlet};
use itertools::Itertools;
use std::collections::HashMap;
use thiserror::Error;

/// Largest node count the permutation search accepts.
pub const MAX_ISO_NODES: usize = 11;

/// Edge-subset guard for [`exact_graphlet_census`].
const CENSUS_GUARD: u128 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IsoError {
    #[error("graph has {0} nodes; the isomorphism oracle handles at most {MAX_ISO_NODES}")]
    TooLarge(usize),
    #[error("census would scan {subsets} edge subsets; the guard is {CENSUS_GUARD}")]
    CensusTooLarge { subsets: u128 },
}

/// Canonical representative of an isomorphism class.
///
/// The encoding is the minimum, over all node permutations, of the upper
/// triangle of the permuted adjacency matrix read in column-major order:
/// pair `(i, j)` with `i < j` precedes `(i', j')` iff `j < j'` or
/// `j = j'` and `i < i'`. Earlier pairs occupy more significant bits, so
/// integer order on `bits` is lexicographic order on the encoding. Two
/// graphs get equal forms iff they are isomorphic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    node_count: u8,
    bits: u64,
}

impl CanonicalForm {
    /// Canonicalizes a graph given as per-node neighbor bitmasks.
    ///
    /// `adjacency[u]` has bit `v` set iff `u` and `v` are adjacent. The
    /// search assigns canonical positions one at a time; placing position
    /// `k` fixes exactly the `k` pairs `(0, k) .. (k-1, k)`, which extend
    /// the encoding prefix, so branches whose prefix already exceeds the
    /// best known encoding are cut.
    pub fn from_adjacency(adjacency: &[u16]) -> Result<CanonicalForm, IsoError> {
        let n = adjacency.len();
        if n > MAX_ISO_NODES {
            return Err(IsoError::TooLarge(n));
        }
        if n <= 1 {
            return Ok(CanonicalForm {
                node_count: n as u8,
                bits: 0,
            });
        }
        let total_pairs = n * (n - 1) / 2;
        let mut search = CanonSearch {
            adjacency,
            total_pairs,
            perm: Vec::with_capacity(n),
            best: (1u64 << total_pairs) - 1,
        };
        search.descend(0, 0, 0);
        Ok(CanonicalForm {
            node_count: n as u8,
            bits: search.best,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count as usize
    }

    /// Raw encoding bits; meaningful only together with the node count.
    pub fn bits(&self) -> u64 {
        self.bits
    }
}

struct CanonSearch<'a> {
    adjacency: &'a [u16],
    total_pairs: usize,
    perm: Vec<u32>,
    best: u64,
}

impl CanonSearch<'_> {
    /// Extends a partial assignment of canonical positions.
    ///
    /// `value` holds the `pairs_done` already-fixed encoding bits, most
    /// significant first.
    fn descend(&mut self, level: usize, value: u64, pairs_done: usize) {
        let n = self.adjacency.len();
        if level == n {
            if value < self.best {
                self.best = value;
            }
            return;
        }
        let mut used: u16 = 0;
        for &p in &self.perm {
            used |= 1 << p;
        }
        // Try candidates in ascending appended-bit order so the first leaf
        // reached is already a strong incumbent for pruning.
        let mut candidates: Vec<(u64, u32)> = (0..n as u32)
            .filter(|&v| used & (1 << v) == 0)
            .map(|v| {
                let mut appended: u64 = 0;
                for (i, &p) in self.perm.iter().enumerate() {
                    let bit = (self.adjacency[p as usize] >> v) & 1;
                    appended |= u64::from(bit) << (level - 1 - i);
                }
                (appended, v)
            })
            .collect();
        candidates.sort_unstable();
        let pairs_new = pairs_done + level;
        for (appended, v) in candidates {
            let extended = (value << level) | appended;
            if extended > self.best >> (self.total_pairs - pairs_new) {
                // Candidates are sorted, so every later one prunes too.
                break;
            }
            self.perm.push(v);
            self.descend(level + 1, extended, pairs_new);
            self.perm.pop();
        }
    }
}

/// Canonical form of a graphlet's local structure (labels ignored).
pub fn canonical_form(g: &Graphlet) -> Result<CanonicalForm, IsoError> {
    CanonicalForm::from_adjacency(&g.local_adjacency())
}

/// Exact isomorphism test by direct bijection search.
///
/// Independent of [`CanonicalForm`]: it never builds an encoding, it
/// searches for a node bijection that maps edges onto edges. The two
/// implementations cross-check each other in the test suite.
pub fn are_isomorphic(a: &Graphlet, b: &Graphlet) -> Result<bool, IsoError> {
    are_isomorphic_adjacency(&a.local_adjacency(), &b.local_adjacency())
}

/// [`are_isomorphic`] over raw neighbor bitmasks.
pub fn are_isomorphic_adjacency(a: &[u16], b: &[u16]) -> Result<bool, IsoError> {
    let n = a.len();
    if n.max(b.len()) > MAX_ISO_NODES {
        return Err(IsoError::TooLarge(n.max(b.len())));
    }
    if n != b.len() {
        return Ok(false);
    }
    let degrees = |adj: &[u16]| {
        let mut d: Vec<u32> = adj.iter().map(|m| m.count_ones()).collect();
        d.sort_unstable();
        d
    };
    if degrees(a) != degrees(b) {
        return Ok(false);
    }
    let mut mapping = vec![u32::MAX; n];
    Ok(extend_bijection(a, b, &mut mapping, 0))
}

/// Tries to map node `next` of `a` onto each unused node of `b` that keeps
/// adjacency to all previously mapped nodes consistent.
fn extend_bijection(a: &[u16], b: &[u16], mapping: &mut [u32], next: usize) -> bool {
    let n = a.len();
    if next == n {
        return true;
    }
    let mut taken: u16 = 0;
    for &m in mapping[..next].iter() {
        taken |= 1 << m;
    }
    'candidate: for v in 0..n as u32 {
        if taken & (1 << v) != 0 {
            continue;
        }
        if b[v as usize].count_ones() != a[next].count_ones() {
            continue;
        }
        for (j, &mj) in mapping[..next].iter().enumerate() {
            let edge_a = (a[next] >> j) & 1;
            let edge_b = (b[v as usize] >> mj) & 1;
            if edge_a != edge_b {
                continue 'candidate;
            }
        }
        mapping[next] = v;
        if extend_bijection(a, b, mapping, next + 1) {
            return true;
        }
        mapping[next] = u32::MAX;
    }
    false
}

/// Exact binomial coefficient, saturating far above the census guard.
fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    result
}

/// Exhaustive census of connected `t`-edge subgraphs, grouped by
/// isomorphism class.
///
/// Scans every `t`-subset of the edge set, keeps the connected ones, and
/// counts instances per canonical form. `t = 0` counts each node as one
/// singleton instance. Errors when more than `10^7` subsets would need
/// scanning.
pub fn exact_graphlet_census(
    g: &AttributedGraph,
    t: usize,
) -> Result<HashMap<CanonicalForm, u64>, IsoError> {
    let mut counts = HashMap::new();
    if t == 0 {
        if g.node_count() > 0 {
            let singleton = CanonicalForm::from_adjacency(&[0u16])?;
            counts.insert(singleton, u64::from(g.node_count()));
        }
        return Ok(counts);
    }
    let m = g.edge_count();
    let subsets = binomial(m, t);
    if subsets > CENSUS_GUARD {
        return Err(IsoError::CensusTooLarge { subsets });
    }
    for combo in (0..m).combinations(t) {
        let edges: Vec<(u32, u32)> = combo.iter().map(|&i| g.edges()[i]).collect();
        let graphlet = Graphlet::from_edges(g, &edges);
        if !graphlet.is_connected() {
            continue;
        }
        *counts.entry(canonical_form(&graphlet)?).or_insert(0) += 1;
    }
    Ok(counts)
}
