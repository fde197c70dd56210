//! Hashed graphlet statistics: vocabulary construction, per-graph
//! histograms, and multi-order feature vectors.
//!
//! A vocabulary is the sorted union of the hash-code keys observed across a
//! dataset, grouped by graphlet order. Each graph's embedding counts how
//! many sampled graphlets of each order fall on each vocabulary position;
//! codes missing from the vocabulary land in a per-order overflow counter
//! so that unseen test-time structures never change the dimensionality.

use crate::graph::AttributedGraph;
use crate::hashing::{hash_code, HashCode, HashFunctionId};
use crate::sampler::{SamplerConfig, SamplerError, WalkContext};
use crate::Graphlet;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("vocabulary holds {vocab} codes but the config hashes with {requested}")]
    FunctionMismatch {
        vocab: HashFunctionId,
        requested: HashFunctionId,
    },
    #[error("no orders requested")]
    NoOrders,
    #[error("order {0} absent from the embedding")]
    MissingOrder(usize),
    #[error("malformed vocabulary key {0:?}")]
    BadKey(String),
}

/// How count vectors are scaled when exported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Raw counts as floats.
    Raw,
    /// Each order's block divided by its own sum (zero blocks stay zero),
    /// so graphs with unequal completed-run counts remain comparable.
    #[default]
    PerOrderL1,
}

/// Full embedding configuration: how to sample and how to hash.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedConfig {
    pub sampler: SamplerConfig,
    pub hash_function: HashFunctionId,
    /// Append sorted label multisets to codes when the graphs carry labels.
    pub use_labels: bool,
    /// Add an order-0 block: one singleton graphlet per node, which with
    /// labels on is a node-label histogram.
    pub include_singletons: bool,
    pub normalization: Normalization,
}

impl EmbedConfig {
    pub fn new(sampler: SamplerConfig, hash_function: HashFunctionId) -> EmbedConfig {
        EmbedConfig {
            sampler,
            hash_function,
            use_labels: false,
            include_singletons: false,
            normalization: Normalization::default(),
        }
    }

    pub fn with_labels(mut self, on: bool) -> EmbedConfig {
        self.use_labels = on;
        self
    }

    pub fn with_singletons(mut self, on: bool) -> EmbedConfig {
        self.include_singletons = on;
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> EmbedConfig {
        self.normalization = normalization;
        self
    }

    /// Orders a histogram under this config spans, ascending.
    fn orders(&self) -> Vec<usize> {
        let first = usize::from(!self.include_singletons);
        (first..=self.sampler.max_order).collect()
    }
}

/// Sorted, duplicate-free universe of hash-code keys, grouped by order.
///
/// Keys are the canonical `HashCode` serializations, sorted
/// lexicographically within each order; a code's position is therefore
/// independent of the order in which graphs were processed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    orders: BTreeMap<usize, Vec<String>>,
    /// Key to position within its order; keys embed the order, so one map
    /// serves all orders.
    index: HashMap<String, usize>,
    functions: BTreeSet<HashFunctionId>,
}

impl Vocabulary {
    /// Orders that have at least one code, ascending.
    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.orders.keys().copied()
    }

    /// Number of vocabulary positions at an order.
    pub fn order_size(&self, t: usize) -> usize {
        self.orders.get(&t).map_or(0, Vec::len)
    }

    /// Sorted keys at an order.
    pub fn keys(&self, t: usize) -> &[String] {
        self.orders.get(&t).map_or(&[], Vec::as_slice)
    }

    /// Total number of codes across orders.
    pub fn len(&self) -> usize {
        self.orders.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// Position of a code within its order's block.
    pub fn position(&self, code: &HashCode) -> Option<usize> {
        self.index.get(&code.to_key()).copied()
    }

    pub fn key_position(&self, key: &str) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Rebuilds a vocabulary from persisted keys.
    pub fn from_keys<I>(keys: I) -> Result<Vocabulary, EmbedError>
    where
        I: IntoIterator<Item = String>,
    {
        let mut grouped: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
        let mut functions = BTreeSet::new();
        for key in keys {
            let mut fields = key.split('|');
            let order = fields
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| EmbedError::BadKey(key.clone()))?;
            let function = fields
                .next()
                .and_then(|f| f.parse::<HashFunctionId>().ok())
                .ok_or_else(|| EmbedError::BadKey(key.clone()))?;
            functions.insert(function);
            grouped.entry(order).or_default().insert(key);
        }
        Ok(Vocabulary::from_grouped(grouped, functions))
    }

    fn from_grouped(
        grouped: BTreeMap<usize, BTreeSet<String>>,
        functions: BTreeSet<HashFunctionId>,
    ) -> Vocabulary {
        let mut orders = BTreeMap::new();
        let mut index = HashMap::new();
        for (order, keys) in grouped {
            let keys: Vec<String> = keys.into_iter().collect();
            for (position, key) in keys.iter().enumerate() {
                index.insert(key.clone(), position);
            }
            orders.insert(order, keys);
        }
        Vocabulary {
            orders,
            index,
            functions,
        }
    }

    fn check_function(&self, requested: HashFunctionId) -> Result<(), EmbedError> {
        for &vocab in &self.functions {
            if vocab != requested {
                return Err(EmbedError::FunctionMismatch { vocab, requested });
            }
        }
        Ok(())
    }
}

/// Sorted union of a code multiset; deterministic for any input order.
pub fn build_vocabulary<I>(codes: I) -> Vocabulary
where
    I: IntoIterator<Item = HashCode>,
{
    let mut grouped: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    let mut functions = BTreeSet::new();
    for code in codes {
        functions.insert(code.function());
        grouped
            .entry(code.edge_count())
            .or_default()
            .insert(code.to_key());
    }
    Vocabulary::from_grouped(grouped, functions)
}

/// One graph's per-order histograms over a vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphletEmbedding {
    counts: BTreeMap<usize, Vec<u64>>,
    overflow: BTreeMap<usize, u64>,
    completed: BTreeMap<usize, u64>,
    normalization: Normalization,
}

impl GraphletEmbedding {
    /// Orders covered by this embedding, ascending.
    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.keys().copied()
    }

    /// Raw per-bin counts at an order (vocabulary positions only).
    pub fn raw_counts(&self, t: usize) -> Option<&[u64]> {
        self.counts.get(&t).map(Vec::as_slice)
    }

    /// Sampled graphlets at this order whose code was not in the
    /// vocabulary.
    pub fn overflow(&self, t: usize) -> u64 {
        self.overflow.get(&t).copied().unwrap_or(0)
    }

    /// Runs that reached this order: equals bin sum plus overflow.
    pub fn completed_runs(&self, t: usize) -> u64 {
        self.completed.get(&t).copied().unwrap_or(0)
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// One order's block under the embedding's own normalization tag.
    pub fn vector(&self, t: usize) -> Option<Vec<f64>> {
        self.counts.get(&t).map(|bins| block(bins, self.normalization))
    }
}

pub(crate) fn block(bins: &[u64], normalization: Normalization) -> Vec<f64> {
    let raw: Vec<f64> = bins.iter().map(|&c| c as f64).collect();
    match normalization {
        Normalization::Raw => raw,
        Normalization::PerOrderL1 => {
            let total: f64 = raw.iter().sum();
            if total > 0.0 {
                raw.into_iter().map(|c| c / total).collect()
            } else {
                raw
            }
        }
    }
}

/// Concatenates the blocks of the requested orders, ascending.
///
/// Duplicate orders are collapsed; every requested order must exist in the
/// embedding.
pub fn combine_orders(
    e: &GraphletEmbedding,
    orders: &[usize],
    normalization: Normalization,
) -> Result<Vec<f64>, EmbedError> {
    if orders.is_empty() {
        return Err(EmbedError::NoOrders);
    }
    let requested: BTreeSet<usize> = orders.iter().copied().collect();
    let mut combined = Vec::new();
    for t in requested {
        let bins = e.counts.get(&t).ok_or(EmbedError::MissingOrder(t))?;
        combined.extend(block(bins, normalization));
    }
    Ok(combined)
}

/// Distinct-code counts per order, plus completed-run counts; the compact
/// intermediate both embedding entry points share.
struct CodeCounts {
    codes: BTreeMap<usize, HashMap<HashCode, u64>>,
    completed: BTreeMap<usize, u64>,
}

/// Samples a graph (streaming run by run) and tallies hash codes.
fn code_counts(g: &AttributedGraph, cfg: &EmbedConfig) -> Result<CodeCounts, EmbedError> {
    cfg.sampler.validate()?;
    let mut codes: BTreeMap<usize, HashMap<HashCode, u64>> = BTreeMap::new();
    let mut completed: BTreeMap<usize, u64> = BTreeMap::new();
    for t in cfg.orders() {
        codes.entry(t).or_default();
        completed.entry(t).or_default();
    }
    if cfg.include_singletons {
        let singles = codes.get_mut(&0).expect("order 0 present");
        for v in 0..g.node_count() {
            let code = hash_code(&Graphlet::singleton(g, v), cfg.hash_function, cfg.use_labels)
                .expect("singletons are connected");
            *singles.entry(code).or_insert(0) += 1;
        }
        *completed.get_mut(&0).expect("order 0 present") = u64::from(g.node_count());
    }
    let context = WalkContext::new(g, &cfg.sampler);
    for run_index in 0..cfg.sampler.runs {
        for glet in context.walk(run_index) {
            let t = glet.edge_count();
            let code = hash_code(&glet, cfg.hash_function, cfg.use_labels)
                .expect("sampled graphlets are connected");
            *codes.get_mut(&t).expect("order covered").entry(code).or_insert(0) += 1;
            *completed.get_mut(&t).expect("order covered") += 1;
        }
    }
    Ok(CodeCounts { codes, completed })
}

fn project(counts: CodeCounts, vocab: &Vocabulary, normalization: Normalization) -> GraphletEmbedding {
    let mut bins_by_order = BTreeMap::new();
    let mut overflow_by_order = BTreeMap::new();
    for (t, code_map) in counts.codes {
        let mut bins = vec![0u64; vocab.order_size(t)];
        let mut overflow = 0u64;
        for (code, count) in code_map {
            match vocab.position(&code) {
                Some(i) => bins[i] += count,
                None => overflow += count,
            }
        }
        bins_by_order.insert(t, bins);
        overflow_by_order.insert(t, overflow);
    }
    GraphletEmbedding {
        counts: bins_by_order,
        overflow: overflow_by_order,
        completed: counts.completed,
        normalization,
    }
}

/// Embeds one graph against an existing vocabulary.
///
/// Samples with the config's own seed, hashes every graphlet, and counts
/// codes into their vocabulary positions; codes the vocabulary lacks go to
/// the per-order overflow. Deterministic for identical inputs.
pub fn embed_graph(
    g: &AttributedGraph,
    cfg: &EmbedConfig,
    vocab: &Vocabulary,
) -> Result<GraphletEmbedding, EmbedError> {
    vocab.check_function(cfg.hash_function)?;
    let counts = code_counts(g, cfg)?;
    Ok(project(counts, vocab, cfg.normalization))
}

/// A whole dataset embedded against its own vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEmbedding {
    pub vocabulary: Vocabulary,
    /// One embedding per input graph, in input order.
    pub embeddings: Vec<GraphletEmbedding>,
    pub config: EmbedConfig,
}

impl DatasetEmbedding {
    /// Feature matrix: one combined vector per graph.
    pub fn combined(
        &self,
        orders: &[usize],
        normalization: Normalization,
    ) -> Result<Vec<Vec<f64>>, EmbedError> {
        self.embeddings
            .iter()
            .map(|e| combine_orders(e, orders, normalization))
            .collect()
    }

    /// All orders the embeddings cover.
    pub fn orders(&self) -> Vec<usize> {
        self.config.orders()
    }
}

/// Samples and embeds every graph, building the vocabulary from the union
/// of observed codes (so overflow is zero here by construction).
///
/// Graph `i` samples with a seed derived from the base seed and `i`, and
/// graphs are processed in parallel; results are ordered and deterministic.
pub fn embed_dataset(
    graphs: &[AttributedGraph],
    cfg: &EmbedConfig,
) -> Result<DatasetEmbedding, EmbedError> {
    cfg.sampler.validate()?;
    let per_graph: Vec<CodeCounts> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut graph_cfg = cfg.clone();
            graph_cfg.sampler.seed = derive_seed(cfg.sampler.seed, i as u64);
            code_counts(g, &graph_cfg)
        })
        .collect::<Result<_, _>>()?;
    let vocabulary = build_vocabulary(
        per_graph
            .iter()
            .flat_map(|c| c.codes.values())
            .flat_map(|m| m.keys().cloned()),
    );
    let embeddings = per_graph
        .into_iter()
        .map(|counts| project(counts, &vocabulary, cfg.normalization))
        .collect();
    Ok(DatasetEmbedding {
        vocabulary,
        embeddings,
        config: cfg.clone(),
    })
}

/// SplitMix64 step: spreads consecutive indexes into independent seeds.
pub(crate) fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::sampler::sample_complexity;

    fn k3() -> AttributedGraph {
        build_graph(3, &[(0, 1), (1, 2), (0, 2)], None, None).unwrap()
    }

    fn k4() -> AttributedGraph {
        build_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None, None).unwrap()
    }

    fn code_of(g: &AttributedGraph, f: HashFunctionId) -> HashCode {
        let glet = Graphlet::from_edges(g, g.edges());
        hash_code(&glet, f, false).unwrap()
    }

    #[test]
    fn vocabulary_is_sorted_union() {
        let path = build_graph(3, &[(0, 1), (1, 2)], None, None).unwrap();
        let c_path = code_of(&path, HashFunctionId::Degree);
        let c_k3 = code_of(&k3(), HashFunctionId::Degree);
        let forward = build_vocabulary(vec![c_k3.clone(), c_path.clone(), c_k3.clone()]);
        let backward = build_vocabulary(vec![c_path.clone(), c_k3.clone()]);
        assert_eq!(forward, backward);
        assert_eq!(forward.order_size(2), 1);
        assert_eq!(forward.order_size(3), 1);
        assert_eq!(forward.len(), 2);
        assert_eq!(forward.position(&c_path), Some(0));
        assert_eq!(forward.position(&c_k3), Some(0));
    }

    #[test]
    fn empty_vocabulary() {
        let vocab = build_vocabulary(Vec::new());
        assert!(vocab.is_empty());
        assert_eq!(vocab.order_size(3), 0);
    }

    #[test]
    fn keys_round_trip_through_from_keys() {
        let vocab = build_vocabulary(vec![
            code_of(&k3(), HashFunctionId::Betweenness),
            code_of(&build_graph(3, &[(0, 1), (1, 2)], None, None).unwrap(), HashFunctionId::Betweenness),
        ]);
        let keys: Vec<String> = vocab
            .orders()
            .flat_map(|t| vocab.keys(t).to_vec())
            .collect();
        assert_eq!(Vocabulary::from_keys(keys).unwrap(), vocab);
        assert!(Vocabulary::from_keys(vec!["junk".to_string()]).is_err());
    }

    fn triangle_config(runs: u32) -> EmbedConfig {
        EmbedConfig::new(SamplerConfig::new(runs, 3, 5), HashFunctionId::Betweenness)
    }

    #[test]
    fn triangle_concentrates_every_order_in_one_bin() {
        let g = k3();
        let dataset = embed_dataset(std::slice::from_ref(&g), &triangle_config(40)).unwrap();
        let e = &dataset.embeddings[0];
        for t in 1..=3 {
            assert_eq!(dataset.vocabulary.order_size(t), 1);
            assert_eq!(e.raw_counts(t).unwrap(), &[40]);
            assert_eq!(e.overflow(t), 0);
            assert_eq!(e.completed_runs(t), 40);
            assert_eq!(e.vector(t).unwrap(), vec![1.0]);
        }
    }

    #[test]
    fn conservation_holds_even_with_empty_vocabulary() {
        let g = k3();
        let e = embed_graph(&g, &triangle_config(25), &Vocabulary::default()).unwrap();
        for t in 1..=3 {
            let bins: u64 = e.raw_counts(t).unwrap().iter().sum();
            assert_eq!(bins + e.overflow(t), e.completed_runs(t));
            assert_eq!(e.overflow(t), 25);
        }
    }

    #[test]
    fn embedding_is_deterministic() {
        let g = k4();
        let cfg = EmbedConfig::new(SamplerConfig::new(60, 3, 11), HashFunctionId::Betweenness);
        let a = embed_dataset(std::slice::from_ref(&g), &cfg).unwrap();
        let b = embed_dataset(std::slice::from_ref(&g), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn k4_order_three_support_is_three_classes() {
        let g = k4();
        let m = sample_complexity(3, 0.05, 0.05).unwrap() as u32;
        let cfg = EmbedConfig::new(SamplerConfig::new(m, 3, 23), HashFunctionId::Betweenness);
        let dataset = embed_dataset(std::slice::from_ref(&g), &cfg).unwrap();
        assert_eq!(dataset.vocabulary.order_size(3), 3);
        let e = &dataset.embeddings[0];
        assert!(e.raw_counts(3).unwrap().iter().all(|&c| c > 0));
        assert_eq!(e.completed_runs(3), u64::from(m));
    }

    #[test]
    fn function_mismatch_is_rejected() {
        let vocab = build_vocabulary(vec![code_of(&k3(), HashFunctionId::Degree)]);
        let err = embed_graph(&k3(), &triangle_config(5), &vocab).unwrap_err();
        assert_eq!(
            err,
            EmbedError::FunctionMismatch {
                vocab: HashFunctionId::Degree,
                requested: HashFunctionId::Betweenness,
            }
        );
    }

    #[test]
    fn combine_orders_concatenates_ascending() {
        let g = k3();
        let dataset = embed_dataset(std::slice::from_ref(&g), &triangle_config(30)).unwrap();
        let e = &dataset.embeddings[0];
        assert_eq!(
            combine_orders(e, &[1, 2], Normalization::PerOrderL1).unwrap(),
            vec![1.0, 1.0]
        );
        assert_eq!(
            combine_orders(e, &[2], Normalization::Raw).unwrap(),
            vec![30.0]
        );
        // Duplicates collapse; order of the request is irrelevant.
        assert_eq!(
            combine_orders(e, &[3, 1, 3], Normalization::PerOrderL1).unwrap(),
            vec![1.0, 1.0]
        );
        assert_eq!(
            combine_orders(e, &[], Normalization::Raw),
            Err(EmbedError::NoOrders)
        );
        assert_eq!(
            combine_orders(e, &[7], Normalization::Raw),
            Err(EmbedError::MissingOrder(7))
        );
    }

    #[test]
    fn vocabulary_union_is_processing_order_independent() {
        let graphs = vec![k3(), k4()];
        let reversed = vec![k4(), k3()];
        let cfg = EmbedConfig::new(SamplerConfig::new(50, 3, 9), HashFunctionId::Degree);
        let a = embed_dataset(&graphs, &cfg).unwrap();
        let b = embed_dataset(&reversed, &cfg).unwrap();
        assert_eq!(a.vocabulary, b.vocabulary);
    }

    #[test]
    fn singleton_block_is_a_label_histogram() {
        let g = build_graph(
            4,
            &[(0, 1), (1, 2), (2, 3)],
            Some(vec![7, 7, 8, 9]),
            None,
        )
        .unwrap();
        let cfg = EmbedConfig::new(SamplerConfig::new(20, 2, 3), HashFunctionId::Degree)
            .with_labels(true)
            .with_singletons(true);
        let dataset = embed_dataset(std::slice::from_ref(&g), &cfg).unwrap();
        let e = &dataset.embeddings[0];
        assert_eq!(dataset.vocabulary.order_size(0), 3);
        let mut counts = e.raw_counts(0).unwrap().to_vec();
        counts.sort_unstable();
        assert_eq!(counts, vec![1, 1, 2]);
        assert_eq!(e.completed_runs(0), 4);
    }

    #[test]
    fn raw_and_normalized_vectors_differ_as_expected() {
        let g = k4();
        let cfg = EmbedConfig::new(SamplerConfig::new(100, 2, 13), HashFunctionId::Degree)
            .with_normalization(Normalization::Raw);
        let dataset = embed_dataset(std::slice::from_ref(&g), &cfg).unwrap();
        let e = &dataset.embeddings[0];
        let raw = e.vector(2).unwrap();
        assert_eq!(raw.iter().sum::<f64>(), 100.0);
        let l1 = combine_orders(e, &[2], Normalization::PerOrderL1).unwrap();
        assert!((l1.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_spread() {
        let seeds: std::collections::HashSet<u64> =
            (0..100).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 100);
        assert_ne!(derive_seed(42, 0), derive_seed(43, 0));
    }
}
