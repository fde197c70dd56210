//! `sge`: stochastic graphlet embedding experiments from the shell.
//!
//! Subcommands mirror the library pipeline: `sample-size` and `collide`
//! answer sizing questions, `embed` turns a TU-layout dataset into a
//! histogram file, and `cv`, `sweep`, and `rho` evaluate embeddings.
//! Commands that write files also drop a `<out>.manifest.json` holding the
//! full parameter set and the SHA-256 of every artifact, so any output can
//! be reproduced byte for byte.
//!
//! Exit codes: 0 on success, 2 for usage errors, 3 for I/O failures, 4
//! when a computation guard trips.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use sge_core::dataset::{load_embeddings, save_embeddings, DatasetError, LoadedEmbeddings};
use sge_core::embed::{embed_dataset, EmbedConfig, EmbedError, Normalization};
use sge_core::eval::{retrieval_rho, robustness_sweep, EvalError, PipelineConfig};
use sge_core::hashing::{collision_rate, HashFunctionId};
use sge_core::kernel::{gram_matrix, KernelKind};
use sge_core::sampler::{graph_count_with_edges, sample_complexity, SamplerConfig};
use sge_core::svm::{cross_validate, CvReport, SvmError, DEFAULT_C_GRID};
use sge_core::{load_tu_dataset, GraphDataset};

#[derive(Parser)]
#[command(
    name = "sge",
    version,
    about = "Stochastic graphlet embeddings for graph classification"
)]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the number of sampling runs M for a target accuracy.
    SampleSize(SampleSizeArgs),
    /// Tabulate hash collision statistics as CSV.
    Collide(CollideArgs),
    /// Embed a TU-layout dataset into a histogram JSONL file.
    Embed(EmbedArgs),
    /// Cross-validate an SVM on an embeddings file.
    Cv(CvArgs),
    /// Re-run the pipeline under edge perturbation and report accuracy per tau.
    Sweep(SweepArgs),
    /// Retrieval agreement between two embeddings of the same graphs.
    Rho(RhoArgs),
}

/// Failures after argument parsing, each with its own exit code.
enum Failure {
    Usage(String),
    Io(String),
    Compute(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Compute(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Compute(m) => m,
        }
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Failure {
        Failure::Io(e.to_string())
    }
}

impl From<EmbedError> for Failure {
    fn from(e: EmbedError) -> Failure {
        match e {
            // Bad sampler parameters are the caller's flags.
            EmbedError::Sampler(inner) => Failure::Usage(inner.to_string()),
            other => Failure::Compute(other.to_string()),
        }
    }
}

impl From<SvmError> for Failure {
    fn from(e: SvmError) -> Failure {
        match e {
            SvmError::Kernel(inner) => Failure::Compute(inner.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        match e {
            EvalError::Embed(inner) => inner.into(),
            EvalError::Svm(inner) => inner.into(),
            EvalError::Graph(inner) => Failure::Compute(inner.to_string()),
            EvalError::BadTau(_) | EvalError::SizeMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Compute(other.to_string()),
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// Manifest.

/// Everything needed to reproduce a run's outputs byte for byte.
#[derive(Default, Serialize)]
struct RunManifest {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    dataset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    embeddings: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hash_function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    use_labels: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalization: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    folds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cv_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    taus: Option<Vec<f64>>,
    /// Output path -> SHA-256 of the written bytes.
    outputs: BTreeMap<String, String>,
}

fn sha256_hex(path: &Path) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(|e| io_failure(path, e))?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        write!(hex, "{byte:02x}").expect("writing to a string");
    }
    Ok(hex)
}

/// Records artifact hashes and writes `<out>.manifest.json` next to `out`.
fn write_manifest(out: &Path, mut manifest: RunManifest) -> Result<(), Failure> {
    manifest
        .outputs
        .insert(out.display().to_string(), sha256_hex(out)?);
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    let path = out.with_file_name(name);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| io_failure(&path, e))
}

// ---------------------------------------------------------------------------
// Flag parsing helpers.

fn parse_hash(s: &str) -> Result<HashFunctionId, String> {
    s.parse()
}

fn parse_kernel(s: &str) -> Result<KernelKind, String> {
    s.parse()
}

fn parse_normalization(s: &str) -> Result<Normalization, String> {
    match s {
        "raw" => Ok(Normalization::Raw),
        "l1" | "per-order-l1" => Ok(Normalization::PerOrderL1),
        other => Err(format!("unknown normalization {other:?} (raw, per-order-l1)")),
    }
}

fn describe_normalization(n: Normalization) -> &'static str {
    match n {
        Normalization::Raw => "raw",
        Normalization::PerOrderL1 => "per-order-l1",
    }
}

/// `--hash` choice for `collide`: one function or the whole set.
#[derive(Clone)]
enum HashChoice {
    All,
    One(HashFunctionId),
}

fn parse_hash_choice(s: &str) -> Result<HashChoice, String> {
    if s == "all" {
        return Ok(HashChoice::All);
    }
    s.parse().map(HashChoice::One)
}

impl HashChoice {
    fn functions(&self) -> Vec<HashFunctionId> {
        match self {
            HashChoice::All => HashFunctionId::ALL.to_vec(),
            HashChoice::One(f) => vec![*f],
        }
    }
}

// ---------------------------------------------------------------------------
// sample-size.

#[derive(Args)]
#[command(group(ArgGroup::new("classes").required(true).args(["a", "t"])))]
struct SampleSizeArgs {
    /// Isomorphism class count at the target order.
    #[arg(long)]
    a: Option<u64>,
    /// Target order in edges; the class count is looked up internally.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=10))]
    t: Option<u64>,
    /// L1 accuracy bound on the estimated distribution.
    #[arg(long)]
    epsilon: f64,
    /// Failure probability bound.
    #[arg(long)]
    delta: f64,
}

fn cmd_sample_size(args: &SampleSizeArgs) -> Result<(), Failure> {
    let a = match args.a {
        Some(a) => a,
        None => {
            let t = args.t.expect("group requires one of a, t") as usize;
            graph_count_with_edges(t).map_err(usage)?
        }
    };
    let m = sample_complexity(a, args.epsilon, args.delta).map_err(usage)?;
    println!("{m}");
    Ok(())
}

// ---------------------------------------------------------------------------
// collide.

#[derive(Args)]
struct CollideArgs {
    /// Largest order to tabulate.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=8), default_value_t = 7)]
    t_max: u64,
    /// One hash function, or `all`.
    #[arg(long, default_value = "all", value_parser = parse_hash_choice)]
    hash: HashChoice,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Rate rounded to 4 decimals with trailing zeros trimmed, so exact zeros
/// print as plain `0`.
fn format_rate(rate: f64) -> String {
    ((rate * 1e4).round() / 1e4).to_string()
}

fn cmd_collide(args: &CollideArgs) -> Result<(), Failure> {
    let mut csv = String::from("t,hash,graphs,pairs,collisions,rate\n");
    for t in 1..=args.t_max as usize {
        for f in args.hash.functions() {
            let stats = collision_rate(t, f).map_err(usage)?;
            writeln!(
                csv,
                "{t},{f},{},{},{},{}",
                stats.graph_count,
                stats.pair_count,
                stats.collision_count,
                format_rate(stats.rate)
            )
            .expect("writing to a string");
        }
    }
    match &args.out {
        None => print!("{csv}"),
        Some(out) => {
            fs::write(out, csv).map_err(|e| io_failure(out, e))?;
            let manifest = RunManifest {
                command: "collide",
                t_max: Some(args.t_max as usize),
                ..RunManifest::default()
            };
            write_manifest(out, manifest)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Shared sampling parameters for embed and sweep.

#[derive(Args)]
#[command(group(ArgGroup::new("budget").required(true).args(["m", "epsilon"])))]
struct EmbedParams {
    /// Dataset directory in TU layout; its final component is the dataset
    /// name.
    #[arg(long)]
    dataset: PathBuf,
    /// Largest graphlet order (edges per sampling run).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=15))]
    t_max: u64,
    /// Explicit number of sampling runs M.
    #[arg(long)]
    m: Option<u32>,
    /// Derive M from (epsilon, delta) at the largest order instead.
    #[arg(long, requires = "delta")]
    epsilon: Option<f64>,
    /// Failure probability bound paired with --epsilon.
    #[arg(long, requires = "epsilon")]
    delta: Option<f64>,
    /// Probability of extending from the current node instead of
    /// restarting from an earlier one.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Hash function for graphlet codes.
    #[arg(long, default_value = "betweenness", value_parser = parse_hash)]
    hash: HashFunctionId,
    /// Fold node/edge labels into the codes.
    #[arg(long)]
    labels: bool,
    /// Base sampling seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl EmbedParams {
    fn load(&self) -> Result<GraphDataset, Failure> {
        let name = self
            .dataset
            .file_name()
            .and_then(|s| s.to_str())
            .ok_or_else(|| {
                Failure::Usage(format!(
                    "dataset path {} has no final component to use as a name",
                    self.dataset.display()
                ))
            })?;
        Ok(load_tu_dataset(&self.dataset, name)?)
    }

    fn resolve_runs(&self) -> Result<u32, Failure> {
        if let Some(m) = self.m {
            return Ok(m);
        }
        let epsilon = self.epsilon.expect("group requires one of m, epsilon");
        let delta = self.delta.expect("epsilon requires delta");
        let a = graph_count_with_edges(self.t_max as usize).map_err(|e| {
            Failure::Usage(format!("{e}; pass --m explicitly for orders above 10"))
        })?;
        let m = sample_complexity(a, epsilon, delta).map_err(usage)?;
        u32::try_from(m).map_err(|_| {
            Failure::Compute(format!("derived M = {m} exceeds the supported run count"))
        })
    }

    fn embed_config(&self, runs: u32) -> EmbedConfig {
        let sampler = SamplerConfig::new(runs, self.t_max as usize, self.seed)
            .with_alpha(self.alpha);
        EmbedConfig::new(sampler, self.hash).with_labels(self.labels)
    }

    /// Manifest skeleton carrying every sampling parameter.
    fn manifest(&self, command: &'static str, runs: u32, dataset: &str) -> RunManifest {
        RunManifest {
            command,
            dataset: Some(dataset.to_string()),
            runs: Some(u64::from(runs)),
            epsilon: self.epsilon,
            delta: self.delta,
            t_max: Some(self.t_max as usize),
            alpha: Some(self.alpha),
            hash_function: Some(self.hash.to_string()),
            use_labels: Some(self.labels),
            seed: Some(self.seed),
            ..RunManifest::default()
        }
    }
}

// ---------------------------------------------------------------------------
// embed.

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    params: EmbedParams,
    /// Output JSONL path for the embeddings.
    #[arg(long)]
    out: PathBuf,
}

fn cmd_embed(args: &EmbedArgs) -> Result<(), Failure> {
    let dataset = args.params.load()?;
    if dataset.asymmetric_edges > 0 {
        eprintln!(
            "warning: {} edge(s) listed in one direction only",
            dataset.asymmetric_edges
        );
    }
    let runs = args.params.resolve_runs()?;
    let cfg = args.params.embed_config(runs);
    let start = Instant::now();
    let embedded = embed_dataset(&dataset.graphs, &cfg)?;
    let elapsed = start.elapsed();
    save_embeddings(&args.out, &dataset.name, &embedded, &dataset.class_labels)?;
    let mut manifest = args.params.manifest("embed", runs, &dataset.name);
    manifest.normalization = Some(describe_normalization(cfg.normalization).to_string());
    write_manifest(&args.out, manifest)?;
    let per_graph = elapsed.as_secs_f64() / dataset.graph_count() as f64;
    eprintln!(
        "embedded {} graphs in {:.2}s ({:.1} ms per graph), vocabulary {} codes -> {}",
        dataset.graph_count(),
        elapsed.as_secs_f64(),
        per_graph * 1e3,
        embedded.vocabulary.len(),
        args.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// cv.

#[derive(Args)]
struct CvArgs {
    /// Embeddings JSONL produced by `embed`.
    #[arg(long)]
    embeddings: PathBuf,
    /// Kernel over the combined histograms.
    #[arg(long, default_value = "hi", value_parser = parse_kernel)]
    kernel: KernelKind,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Cross-validation shuffle seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated C candidates for the inner model selection.
    #[arg(long, value_delimiter = ',')]
    c_grid: Option<Vec<f64>>,
    /// Histogram scaling applied before the kernel.
    #[arg(long, default_value = "per-order-l1", value_parser = parse_normalization)]
    normalization: Normalization,
    /// Also write the report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CvReportOut {
    dataset: String,
    kernel: String,
    normalization: String,
    folds: usize,
    seed: u64,
    c_grid: Vec<f64>,
    fold_accuracies: Vec<f64>,
    chosen_c: Vec<f64>,
    mean_accuracy: f64,
    std_accuracy: f64,
    all_converged: bool,
}

fn features_of(
    loaded: &LoadedEmbeddings,
    normalization: Normalization,
) -> Result<Vec<Vec<f64>>, Failure> {
    let orders = loaded.orders();
    if orders.is_empty() {
        return Err(Failure::Compute(
            "embeddings share no common orders".to_string(),
        ));
    }
    Ok(loaded.features(&orders, normalization)?)
}

fn print_report(report: &CvReport) {
    let join = |values: &[f64], places: usize| {
        values
            .iter()
            .map(|v| format!("{v:.places$}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("folds: {}", report.fold_accuracies.len());
    println!("fold accuracies: {}", join(&report.fold_accuracies, 4));
    println!("chosen C: {:?}", report.chosen_c);
    println!("mean accuracy: {:.4}", report.mean_accuracy);
    println!("std accuracy: {:.4}", report.std_accuracy);
    println!("all folds converged: {}", report.all_converged);
}

fn cmd_cv(args: &CvArgs) -> Result<(), Failure> {
    let loaded = load_embeddings(&args.embeddings)?;
    let features = features_of(&loaded, args.normalization)?;
    let classes = loaded.classes();
    let grid = args.c_grid.clone().unwrap_or_else(|| DEFAULT_C_GRID.to_vec());
    let report = cross_validate(&features, &classes, args.kernel, args.folds, &grid, args.seed)?;
    print_report(&report);
    if let Some(out) = &args.out {
        let body = CvReportOut {
            dataset: loaded.dataset.clone(),
            kernel: args.kernel.to_string(),
            normalization: describe_normalization(args.normalization).to_string(),
            folds: args.folds,
            seed: args.seed,
            c_grid: grid.clone(),
            fold_accuracies: report.fold_accuracies.clone(),
            chosen_c: report.chosen_c.clone(),
            mean_accuracy: report.mean_accuracy,
            std_accuracy: report.std_accuracy,
            all_converged: report.all_converged,
        };
        let json = serde_json::to_string_pretty(&body).expect("report serializes");
        fs::write(out, json + "\n").map_err(|e| io_failure(out, e))?;
        let manifest = RunManifest {
            command: "cv",
            dataset: Some(loaded.dataset.clone()),
            embeddings: Some(vec![args.embeddings.display().to_string()]),
            kernel: Some(args.kernel.to_string()),
            normalization: Some(describe_normalization(args.normalization).to_string()),
            folds: Some(args.folds),
            cv_seed: Some(args.seed),
            c_grid: Some(grid),
            ..RunManifest::default()
        };
        write_manifest(out, manifest)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep.

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: EmbedParams,
    /// Comma-separated edge-retention factors, each on the supported grid
    /// 0.2, 0.4, ..., 2.0.
    #[arg(long, value_delimiter = ',', required = true)]
    tau: Vec<f64>,
    /// Kernel over the combined histograms.
    #[arg(long, default_value = "hi", value_parser = parse_kernel)]
    kernel: KernelKind,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Comma-separated C candidates for the inner model selection.
    #[arg(long, value_delimiter = ',')]
    c_grid: Option<Vec<f64>>,
    /// Cross-validation shuffle seed.
    #[arg(long, default_value_t = 0)]
    cv_seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let dataset = args.params.load()?;
    let runs = args.params.resolve_runs()?;
    let grid = args.c_grid.clone().unwrap_or_else(|| DEFAULT_C_GRID.to_vec());
    let cfg = PipelineConfig::new(args.params.embed_config(runs), args.kernel)
        .with_folds(args.folds)
        .with_c_grid(grid.clone())
        .with_cv_seed(args.cv_seed);
    let rows = robustness_sweep(&dataset.graphs, &dataset.class_labels, &args.tau, &cfg)?;
    let mut csv = String::from("tau,mean_accuracy,std_accuracy\n");
    for row in &rows {
        writeln!(csv, "{},{},{}", row.tau, row.mean_accuracy, row.std_accuracy)
            .expect("writing to a string");
    }
    match &args.out {
        None => print!("{csv}"),
        Some(out) => {
            fs::write(out, csv).map_err(|e| io_failure(out, e))?;
            let mut manifest = args.params.manifest("sweep", runs, &dataset.name);
            manifest.kernel = Some(args.kernel.to_string());
            manifest.folds = Some(args.folds);
            manifest.cv_seed = Some(args.cv_seed);
            manifest.c_grid = Some(grid);
            manifest.taus = Some(args.tau.clone());
            write_manifest(out, manifest)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// rho.

#[derive(Args)]
struct RhoArgs {
    /// Embeddings whose induced rankings are under test.
    #[arg(long)]
    query_embeddings: PathBuf,
    /// Embeddings whose induced rankings serve as ground truth.
    #[arg(long)]
    model_embeddings: PathBuf,
    /// Kernel that induces the rankings.
    #[arg(long, default_value = "hi", value_parser = parse_kernel)]
    kernel: KernelKind,
    /// Histogram scaling applied before the kernel.
    #[arg(long, default_value = "per-order-l1", value_parser = parse_normalization)]
    normalization: Normalization,
    /// Also write the report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RhoReportOut {
    query_embeddings: String,
    model_embeddings: String,
    kernel: String,
    normalization: String,
    per_query: Vec<f64>,
    mean_rho: f64,
}

/// Item indices ranked by descending similarity to `query`, self excluded,
/// ties broken by index.
fn ranking(gram: &sge_core::GramMatrix, query: usize) -> Vec<usize> {
    let row = gram.row(query);
    let mut order: Vec<usize> = (0..row.len()).filter(|&j| j != query).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
    order
}

fn cmd_rho(args: &RhoArgs) -> Result<(), Failure> {
    let query = load_embeddings(&args.query_embeddings)?;
    let model = load_embeddings(&args.model_embeddings)?;
    if query.records.len() != model.records.len() {
        return Err(Failure::Usage(format!(
            "files embed different item counts: {} vs {}",
            query.records.len(),
            model.records.len()
        )));
    }
    if query.records.len() < 2 {
        return Err(Failure::Usage(
            "need at least 2 embedded graphs to rank".to_string(),
        ));
    }
    let query_gram = gram_matrix(&features_of(&query, args.normalization)?, args.kernel)
        .map_err(|e| Failure::Compute(e.to_string()))?;
    let model_gram = gram_matrix(&features_of(&model, args.normalization)?, args.kernel)
        .map_err(|e| Failure::Compute(e.to_string()))?;
    let per_query: Vec<f64> = (0..query.records.len())
        .map(|i| {
            retrieval_rho(&ranking(&query_gram, i), &ranking(&model_gram, i))
                .map_err(Failure::from)
        })
        .collect::<Result<_, _>>()?;
    let mean_rho = per_query.iter().sum::<f64>() / per_query.len() as f64;
    println!("queries: {}", per_query.len());
    println!("mean rho: {mean_rho:.4}");
    if let Some(out) = &args.out {
        let body = RhoReportOut {
            query_embeddings: args.query_embeddings.display().to_string(),
            model_embeddings: args.model_embeddings.display().to_string(),
            kernel: args.kernel.to_string(),
            normalization: describe_normalization(args.normalization).to_string(),
            per_query,
            mean_rho,
        };
        let json = serde_json::to_string_pretty(&body).expect("report serializes");
        fs::write(out, json + "\n").map_err(|e| io_failure(out, e))?;
        let manifest = RunManifest {
            command: "rho",
            embeddings: Some(vec![
                args.query_embeddings.display().to_string(),
                args.model_embeddings.display().to_string(),
            ]),
            kernel: Some(args.kernel.to_string()),
            normalization: Some(describe_normalization(args.normalization).to_string()),
            ..RunManifest::default()
        };
        write_manifest(out, manifest)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Compute(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::SampleSize(args) => cmd_sample_size(args),
        Command::Collide(args) => cmd_collide(args),
        Command::Embed(args) => cmd_embed(args),
        Command::Cv(args) => cmd_cv(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Rho(args) => cmd_rho(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
