//! End-to-end tests of the `sge` binary: reference values, exit codes,
//! reproducibility, and the embed -> cv/sweep/rho round trip on a small
//! synthetic dataset.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn sge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

/// Writes a TU-layout dataset of 6 cycles (class -1) and 6 stars (class 1),
/// nodes labeled by index parity.
fn write_synthetic_tu(dir: &Path, name: &str) {
    let mut adjacency = String::new();
    let mut indicator = String::new();
    let mut graph_labels = String::new();
    let mut node_labels = String::new();
    let mut next_node = 1u32;
    let mut graph_index = 0usize;
    let mut add_graph = |edges: &[(u32, u32)], n: u32, class: i32| {
        let base = next_node;
        for &(u, v) in edges {
            writeln!(adjacency, "{}, {}", base + u, base + v).unwrap();
            writeln!(adjacency, "{}, {}", base + v, base + u).unwrap();
        }
        for local in 0..n {
            writeln!(indicator, "{}", graph_index + 1).unwrap();
            writeln!(node_labels, "{}", local % 2).unwrap();
        }
        writeln!(graph_labels, "{class}").unwrap();
        next_node = base + n;
        graph_index += 1;
    };
    for k in 5..11u32 {
        let cycle: Vec<(u32, u32)> = (0..k).map(|j| (j, (j + 1) % k)).collect();
        add_graph(&cycle, k, -1);
    }
    for k in 5..11u32 {
        let star: Vec<(u32, u32)> = (1..=k).map(|j| (0, j)).collect();
        add_graph(&star, k + 1, 1);
    }
    fs::write(dir.join(format!("{name}_A.txt")), adjacency).unwrap();
    fs::write(dir.join(format!("{name}_graph_indicator.txt")), indicator).unwrap();
    fs::write(dir.join(format!("{name}_graph_labels.txt")), graph_labels).unwrap();
    fs::write(dir.join(format!("{name}_node_labels.txt")), node_labels).unwrap();
}

/// Tempdir with the dataset under `SYNTH/` plus the embed flags to use it.
fn synthetic_dataset() -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("SYNTH");
    fs::create_dir(&data).unwrap();
    write_synthetic_tu(&data, "SYNTH");
    let path = data.display().to_string();
    (dir, path)
}

#[test]
fn sample_size_resolves_class_count_from_order() {
    let by_order = sge(&["sample-size", "--t", "4", "--epsilon", "0.1", "--delta", "0.1"]);
    assert!(by_order.status.success());
    assert_eq!(stdout(&by_order), "1154\n");
    let by_count = sge(&["sample-size", "--a", "1", "--epsilon", "0.1", "--delta", "0.1"]);
    assert!(by_count.status.success());
    assert_eq!(stdout(&by_count), "600\n");
}

#[test]
fn sample_size_rejects_bad_epsilon() {
    let output = sge(&["sample-size", "--a", "3", "--epsilon", "0", "--delta", "0.1"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("epsilon"));
}

#[test]
fn sample_size_requires_one_of_a_or_t() {
    let neither = sge(&["sample-size", "--epsilon", "0.1", "--delta", "0.1"]);
    assert_eq!(neither.status.code(), Some(2));
    let both = sge(&[
        "sample-size", "--a", "3", "--t", "3", "--epsilon", "0.1", "--delta", "0.1",
    ]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn collide_emits_reference_rows() {
    let output = sge(&["collide", "--t-max", "5"]);
    assert!(output.status.success());
    let csv = stdout(&output);
    assert!(csv.starts_with("t,hash,graphs,pairs,collisions,rate\n"));
    assert!(csv.contains("5,degree,12,66,2,0.0303\n"));
    assert!(csv.contains("3,betweenness,3,3,0,0\n"));
}

#[test]
fn collide_rejects_orders_above_bound() {
    let output = sge(&["collide", "--t-max", "9"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn embed_is_reproducible_and_manifested() {
    let (dir, data) = synthetic_dataset();
    let out_a = dir.path().join("a.jsonl");
    let out_b = dir.path().join("b.jsonl");
    for out in [&out_a, &out_b] {
        let output = sge(&[
            "embed", "--dataset", &data, "--t-max", "3", "--m", "200", "--labels",
            "--seed", "11", "--out", &out.display().to_string(),
        ]);
        assert!(output.status.success(), "embed failed: {}", stderr(&output));
    }
    let bytes = fs::read(&out_a).unwrap();
    assert_eq!(bytes, fs::read(&out_b).unwrap(), "same flags, same bytes");

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.jsonl.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "embed");
    assert_eq!(manifest["dataset"], "SYNTH");
    assert_eq!(manifest["runs"], 200);
    let recorded = manifest["outputs"][&out_a.display().to_string()]
        .as_str()
        .expect("digest recorded");
    let mut digest = String::new();
    for byte in Sha256::digest(&bytes) {
        write!(digest, "{byte:02x}").unwrap();
    }
    assert_eq!(recorded, digest);
}

#[test]
fn embed_derives_runs_from_epsilon_delta() {
    let (dir, data) = synthetic_dataset();
    let out = dir.path().join("eps.jsonl");
    let output = sge(&[
        "embed", "--dataset", &data, "--t-max", "3", "--epsilon", "0.1", "--delta", "0.1",
        "--out", &out.display().to_string(),
    ]);
    assert!(output.status.success(), "embed failed: {}", stderr(&output));
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("eps.jsonl.manifest.json")).unwrap(),
    )
    .unwrap();
    // 877 runs for 3 classes at (0.1, 0.1).
    assert_eq!(manifest["runs"], 877);
    assert_eq!(manifest["epsilon"], 0.1);
}

#[test]
fn cv_reports_perfect_accuracy_on_separable_data() {
    let (dir, data) = synthetic_dataset();
    let emb = dir.path().join("emb.jsonl");
    let report = dir.path().join("cv.json");
    let embed = sge(&[
        "embed", "--dataset", &data, "--t-max", "3", "--m", "200", "--labels",
        "--seed", "11", "--out", &emb.display().to_string(),
    ]);
    assert!(embed.status.success(), "embed failed: {}", stderr(&embed));
    let cv = sge(&[
        "cv", "--embeddings", &emb.display().to_string(), "--folds", "3",
        "--c-grid", "1", "--out", &report.display().to_string(),
    ]);
    assert!(cv.status.success(), "cv failed: {}", stderr(&cv));
    assert!(stdout(&cv).contains("mean accuracy: 1.0000"), "{}", stdout(&cv));
    let body: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(body["mean_accuracy"], 1.0);
    assert_eq!(body["all_converged"], true);
}

#[test]
fn sweep_baseline_row_matches_cv() {
    let (dir, data) = synthetic_dataset();
    let emb = dir.path().join("emb.jsonl");
    let embed = sge(&[
        "embed", "--dataset", &data, "--t-max", "3", "--m", "200", "--labels",
        "--seed", "11", "--out", &emb.display().to_string(),
    ]);
    assert!(embed.status.success());
    let cv_report = dir.path().join("cv.json");
    let cv = sge(&[
        "cv", "--embeddings", &emb.display().to_string(), "--folds", "3",
        "--c-grid", "1", "--out", &cv_report.display().to_string(),
    ]);
    assert!(cv.status.success());
    let cv_body: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&cv_report).unwrap()).unwrap();

    let sweep = sge(&[
        "sweep", "--dataset", &data, "--t-max", "3", "--m", "200", "--labels",
        "--seed", "11", "--tau", "1.0", "--folds", "3", "--c-grid", "1",
    ]);
    assert!(sweep.status.success(), "sweep failed: {}", stderr(&sweep));
    let csv = stdout(&sweep);
    let row = csv.lines().nth(1).expect("one data row");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "1");
    let swept: f64 = fields[1].parse().unwrap();
    assert_eq!(swept, cv_body["mean_accuracy"].as_f64().unwrap());
}

#[test]
fn rho_of_identical_embeddings_is_one() {
    let (dir, data) = synthetic_dataset();
    let emb = dir.path().join("emb.jsonl");
    let embed = sge(&[
        "embed", "--dataset", &data, "--t-max", "3", "--m", "200", "--labels",
        "--seed", "11", "--out", &emb.display().to_string(),
    ]);
    assert!(embed.status.success());
    let emb_flag = emb.display().to_string();
    let rho = sge(&[
        "rho", "--query-embeddings", &emb_flag, "--model-embeddings", &emb_flag,
    ]);
    assert!(rho.status.success(), "rho failed: {}", stderr(&rho));
    assert!(stdout(&rho).contains("mean rho: 1.0000"), "{}", stdout(&rho));
}

#[test]
fn missing_dataset_exits_with_io_code() {
    let output = sge(&[
        "embed", "--dataset", "/nonexistent/DATA", "--t-max", "3", "--m", "10",
        "--out", "/tmp/unused.jsonl",
    ]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn off_grid_tau_is_usage_error() {
    let (_dir, data) = synthetic_dataset();
    let output = sge(&[
        "sweep", "--dataset", &data, "--t-max", "3", "--m", "50", "--tau", "0.7",
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("grid"));
}

#[test]
fn order_above_ten_needs_explicit_runs() {
    let (dir, data) = synthetic_dataset();
    let out = dir.path().join("big.jsonl");
    let output = sge(&[
        "embed", "--dataset", &data, "--t-max", "12", "--epsilon", "0.1",
        "--delta", "0.1", "--out", &out.display().to_string(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("--m"));
}
