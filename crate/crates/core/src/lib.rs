//! Stochastic graphlet embeddings (SGE).
//!
//! This crate turns arbitrary undirected graphs into fixed-length histogram
//! vectors by stochastically sampling connected subgraphs ("graphlets") of
//! increasing edge count, partitioning them into isomorphism classes with
//! permutation-invariant topological hash codes, and counting class
//! frequencies. The resulting embeddings feed a histogram-intersection (or
//! cosine) kernel, an in-house SVM with cross-validation, a retrieval score,
//! and a structural-robustness experiment driver.
//!
//! The pipeline, end to end:
//!
//! 1. [`graph`] — the attributed-graph data model and edge perturbation.
//! 2. [`sampler`] — random-walk-with-restart graphlet parsing and the
//!    sample-complexity calculator that sizes the number of runs.
//! 3. [`hashing`] — exact topological hash functions (degree, betweenness,
//!    core numbers, clustering), code construction, connected-graph
//!    enumeration by edge count, and collision-rate evaluation.
//! 4. [`iso`] — brute-force isomorphism oracle and exhaustive graphlet
//!    census, used as ground truth by the test suite.
//! 5. [`embed`] — vocabulary construction and per-order histograms.
//! 6. [`kernel`], [`svm`], [`eval`] — Gram matrices, SMO-style SVM with
//!    stratified cross-validation, retrieval score, robustness sweep.
//! 7. [`dataset`] — TU-format benchmark loading and artifact persistence.
//!
//! # Example
//!
//! ```
//! use sge_core::{build_graph, parse_graphlets, HashFunctionId, SamplerConfig};
//!
//! let triangle = build_graph(3, &[(0, 1), (1, 2), (0, 2)], None, None).unwrap();
//! let cfg = SamplerConfig::new(100, 3, 7);
//! let sample = parse_graphlets(&triangle, &cfg).unwrap();
//! // every 3-edge graphlet of a triangle is the triangle itself
//! assert_eq!(sample.bag_len(3), 100);
//! let code = sge_core::hash_code(
//!     sample.bag(3).next().unwrap(),
//!     HashFunctionId::Betweenness,
//!     false,
//! )
//! .unwrap();
//! assert_eq!(code.to_key(), "3|betweenness|0/1,0/1,0/1");
//! ```

pub mod dataset;
pub mod embed;
pub mod eval;
pub mod graph;
pub mod hashing;
pub mod iso;
pub mod kernel;
pub mod rational;
pub mod sampler;
pub mod svm;

pub use dataset::{load_tu_dataset, GraphDataset};
pub use embed::{
    build_vocabulary, combine_orders, embed_dataset, embed_graph, DatasetEmbedding, EmbedConfig,
    GraphletEmbedding, Normalization, Vocabulary,
};
pub use eval::{retrieval_rho, robustness_sweep, run_pipeline, PipelineConfig, SweepRow};
pub use graph::{build_graph, perturb_edges, AttributedGraph, Graphlet};
pub use hashing::{
    collision_rate, enumerate_connected_graphs, hash_code, select_best_hash, CollisionStats,
    HashCode, HashFunctionId,
};
pub use iso::{are_isomorphic, canonical_form, exact_graphlet_census, CanonicalForm};
pub use kernel::{cosine_sim, gram_matrix, hi_kernel, GramMatrix, KernelKind};
pub use rational::Rational;
pub use sampler::{
    graph_count_with_edges, parse_graphlets, parse_graphlets_parallel, sample_complexity,
    GraphletSample, SamplerConfig,
};
pub use svm::{cross_validate, cross_validate_gram, svm_predict, svm_train, CvReport, SvmModel};
