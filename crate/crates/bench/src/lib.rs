//! Fixture graphs shared by the benches.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sge_core::{build_graph, AttributedGraph};

/// Random connected graph on `n` nodes with `m` edges: a random spanning
/// tree plus distinct chords. Requires `n - 1 <= m <= n(n-1)/2`.
pub fn random_connected_graph(n: usize, m: usize, seed: u64) -> AttributedGraph {
    assert!(n >= 2 && m >= n - 1 && m <= n * (n - 1) / 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut rng);
    let mut edges: HashSet<(u32, u32)> = HashSet::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let child = order[i];
        edges.insert((parent.min(child), parent.max(child)));
    }
    while edges.len() < m {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let mut list: Vec<(u32, u32)> = edges.into_iter().collect();
    list.sort_unstable();
    build_graph(n as u32, &list, None, None).expect("generated edges are valid")
}

/// Ring of `n` nodes with chords to both next-nearest neighbors: every
/// node has degree 4 regardless of `n`.
pub fn circulant(n: u32) -> AttributedGraph {
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for i in 0..n {
        for step in [1, 2] {
            let j = (i + step) % n;
            edges.push((i.min(j), i.max(j)));
        }
    }
    edges.sort_unstable();
    build_graph(n, &edges, None, None).expect("circulant edges are valid")
}
