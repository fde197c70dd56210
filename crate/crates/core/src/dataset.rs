//! Benchmark dataset ingestion and artifact persistence.
//!
//! Reads the TU collection layout (one `{name}_*.txt` family per dataset),
//! writes embeddings as versioned JSON lines, and writes Gram matrices in a
//! plain-text label-first layout usable by external SVM tools.

use crate::embed::{block, DatasetEmbedding, EmbedError, Normalization, Vocabulary};
use crate::graph::{build_graph, AttributedGraph, GraphError, Label};
use crate::hashing::HashFunctionId;
use crate::kernel::{GramMatrix, KernelError, SYMMETRY_TOL};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("missing required file {0}")]
    MissingFile(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{file}:{line}: cannot parse {content:?}")]
    Parse {
        file: String,
        line: usize,
        content: String,
    },
    #[error("{file}: expected {expected} lines, found {got}")]
    LineCount {
        file: String,
        expected: usize,
        got: usize,
    },
    #[error("edge ({u}, {v}) crosses graph boundaries")]
    CrossGraphEdge { u: u32, v: u32 },
    #[error("node {node} out of range 1..={node_count} at {file}:{line}")]
    NodeOutOfRange {
        file: String,
        line: usize,
        node: u32,
        node_count: usize,
    },
    #[error("{got} labels for {expected} items")]
    LabelCount { expected: usize, got: usize },
    #[error("embedding record misses order {0}")]
    MissingOrder(usize),
    #[error("unsupported format version {got}; this build reads {expected}")]
    Version { got: u32, expected: u32 },
    #[error("corrupt file: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A named collection of graphs with aligned class labels.
#[derive(Debug, Clone)]
pub struct GraphDataset {
    pub name: String,
    pub graphs: Vec<AttributedGraph>,
    /// Contiguous 0-based class per graph.
    pub class_labels: Vec<i32>,
    /// Original file labels, ascending; position = remapped class id.
    pub label_map: Vec<i32>,
    /// Directed edge lines in the source file, before deduplication.
    pub raw_edge_lines: usize,
    /// Edges listed in one direction only; accepted, but worth reporting.
    pub asymmetric_edges: usize,
}

impl GraphDataset {
    pub fn graph_count(&self) -> usize {
        self.graphs.len()
    }

    pub fn class_count(&self) -> usize {
        self.label_map.len()
    }

    /// Deduplicated undirected edges over all graphs.
    pub fn edge_count(&self) -> usize {
        self.graphs.iter().map(AttributedGraph::edge_count).sum()
    }

    pub fn mean_node_count(&self) -> f64 {
        let total: usize = self.graphs.iter().map(|g| g.node_count() as usize).sum();
        total as f64 / self.graphs.len() as f64
    }

    pub fn mean_edge_count(&self) -> f64 {
        self.edge_count() as f64 / self.graphs.len() as f64
    }
}

/// Non-empty trimmed lines of a mandatory file.
fn read_lines(path: &Path) -> Result<Vec<String>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            DatasetError::MissingFile(path.to_path_buf())
        } else {
            DatasetError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

/// Same, but a missing file is `None` (for the optional label files).
fn read_optional_lines(path: &Path) -> Result<Option<Vec<String>>, DatasetError> {
    match read_lines(path) {
        Ok(lines) => Ok(Some(lines)),
        Err(DatasetError::MissingFile(_)) => Ok(None),
        Err(other) => Err(other),
    }
}

fn parse_i32(file: &str, line: usize, content: &str) -> Result<i32, DatasetError> {
    content.parse().map_err(|_| DatasetError::Parse {
        file: file.to_owned(),
        line,
        content: content.to_owned(),
    })
}

/// Loads a dataset stored in the TU benchmark layout.
///
/// Mandatory files: `{name}_A.txt` with comma-separated 1-indexed edge
/// endpoints, `{name}_graph_indicator.txt` mapping each node to its graph,
/// and `{name}_graph_labels.txt`. Node and edge label files are optional.
/// Edges listed in both directions collapse to one undirected edge; an edge
/// listed once is kept and counted in
/// [`asymmetric_edges`](GraphDataset::asymmetric_edges). Class labels are
/// remapped to contiguous 0-based ids in ascending original order.
pub fn load_tu_dataset(directory: &Path, name: &str) -> Result<GraphDataset, DatasetError> {
    let file = |suffix: &str| directory.join(format!("{name}_{suffix}.txt"));

    let indicator_name = format!("{name}_graph_indicator.txt");
    let indicator_lines = read_lines(&file("graph_indicator"))?;
    let node_count = indicator_lines.len();
    let mut graph_count = 0usize;
    // Global 1-based node id -> (graph index, local node index).
    let mut location = Vec::with_capacity(node_count);
    let mut nodes_per_graph: Vec<u32> = Vec::new();
    for (i, line) in indicator_lines.iter().enumerate() {
        let graph_id = parse_i32(&indicator_name, i + 1, line)?;
        if graph_id < 1 {
            return Err(DatasetError::Parse {
                file: indicator_name.clone(),
                line: i + 1,
                content: line.clone(),
            });
        }
        let graph = (graph_id - 1) as usize;
        if graph >= nodes_per_graph.len() {
            nodes_per_graph.resize(graph + 1, 0);
        }
        location.push((graph, nodes_per_graph[graph]));
        nodes_per_graph[graph] += 1;
        graph_count = graph_count.max(graph + 1);
    }

    let a_name = format!("{name}_A.txt");
    let edge_lines = read_lines(&file("A"))?;
    let raw_edge_lines = edge_lines.len();
    let edge_label_lines = read_optional_lines(&file("edge_labels"))?;
    if let Some(lines) = &edge_label_lines {
        if lines.len() != raw_edge_lines {
            return Err(DatasetError::LineCount {
                file: format!("{name}_edge_labels.txt"),
                expected: raw_edge_lines,
                got: lines.len(),
            });
        }
    }

    // Per graph: undirected edges in first-appearance order, the label of the
    // first appearance, and which directions each edge was listed in.
    let mut edges: Vec<Vec<(u32, u32)>> = vec![Vec::new(); graph_count];
    let mut edge_labels: Vec<Vec<Label>> = vec![Vec::new(); graph_count];
    let mut directions: HashMap<(usize, u32, u32), (bool, bool)> = HashMap::new();
    for (i, line) in edge_lines.iter().enumerate() {
        let parse_err = || DatasetError::Parse {
            file: a_name.clone(),
            line: i + 1,
            content: line.clone(),
        };
        let (left, right) = line.split_once(',').ok_or_else(parse_err)?;
        let u: u32 = left.trim().parse().map_err(|_| parse_err())?;
        let v: u32 = right.trim().parse().map_err(|_| parse_err())?;
        for node in [u, v] {
            if node < 1 || node as usize > node_count {
                return Err(DatasetError::NodeOutOfRange {
                    file: a_name.clone(),
                    line: i + 1,
                    node,
                    node_count,
                });
            }
        }
        let (gu, lu) = location[(u - 1) as usize];
        let (gv, lv) = location[(v - 1) as usize];
        if gu != gv {
            return Err(DatasetError::CrossGraphEdge { u, v });
        }
        // Validate every label line; the first appearance's label is kept.
        let label = match &edge_label_lines {
            Some(lines) => Some(parse_i32(
                &format!("{name}_edge_labels.txt"),
                i + 1,
                &lines[i],
            )?),
            None => None,
        };
        let key = (gu, lu.min(lv), lu.max(lv));
        let entry = directions.entry(key).or_insert_with(|| {
            edges[gu].push((key.1, key.2));
            if let Some(label) = label {
                edge_labels[gu].push(label);
            }
            (false, false)
        });
        if lu <= lv {
            entry.0 = true;
        } else {
            entry.1 = true;
        }
    }
    let asymmetric_edges = directions.values().filter(|(f, b)| f != b).count();

    let node_label_lines = read_optional_lines(&file("node_labels"))?;
    let node_labels: Option<Vec<Vec<Label>>> = match node_label_lines {
        None => None,
        Some(lines) => {
            if lines.len() != node_count {
                return Err(DatasetError::LineCount {
                    file: format!("{name}_node_labels.txt"),
                    expected: node_count,
                    got: lines.len(),
                });
            }
            let mut per_graph: Vec<Vec<Label>> = vec![Vec::new(); graph_count];
            for (i, line) in lines.iter().enumerate() {
                let label = parse_i32(&format!("{name}_node_labels.txt"), i + 1, line)?;
                per_graph[location[i].0].push(label);
            }
            Some(per_graph)
        }
    };

    let label_name = format!("{name}_graph_labels.txt");
    let label_lines = read_lines(&file("graph_labels"))?;
    if label_lines.len() != graph_count {
        return Err(DatasetError::LineCount {
            file: label_name.clone(),
            expected: graph_count,
            got: label_lines.len(),
        });
    }
    let raw_labels: Vec<i32> = label_lines
        .iter()
        .enumerate()
        .map(|(i, line)| parse_i32(&label_name, i + 1, line))
        .collect::<Result<_, _>>()?;
    let label_map: Vec<i32> = raw_labels
        .iter()
        .copied()
        .collect::<BTreeSet<i32>>()
        .into_iter()
        .collect();
    let class_labels: Vec<i32> = raw_labels
        .iter()
        .map(|l| label_map.binary_search(l).expect("label in map") as i32)
        .collect();

    let mut graphs = Vec::with_capacity(graph_count);
    for g in 0..graph_count {
        graphs.push(build_graph(
            nodes_per_graph[g],
            &edges[g],
            node_labels.as_ref().map(|n| n[g].clone()),
            edge_label_lines.as_ref().map(|_| edge_labels[g].clone()),
        )?);
    }
    Ok(GraphDataset {
        name: name.to_owned(),
        graphs,
        class_labels,
        label_map,
        raw_edge_lines,
        asymmetric_edges,
    })
}

/// Embedding files start with this version and reject others on load.
pub const EMBEDDING_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct EmbeddingHeader {
    format_version: u32,
    dataset: String,
    t_max: usize,
    hash_function: HashFunctionId,
    vocabulary: Vec<String>,
}

/// One persisted graph embedding: raw bin counts per order, vocabulary
/// positions implied by the header's key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub graph_index: usize,
    pub class: i32,
    pub histograms: BTreeMap<usize, Vec<u64>>,
}

/// An embedding file read back into memory.
#[derive(Debug, Clone)]
pub struct LoadedEmbeddings {
    pub dataset: String,
    pub t_max: usize,
    pub hash_function: HashFunctionId,
    pub vocabulary: Vocabulary,
    pub records: Vec<EmbeddingRecord>,
}

impl LoadedEmbeddings {
    /// Feature matrix over the given orders, one vector per record.
    pub fn features(
        &self,
        orders: &[usize],
        normalization: Normalization,
    ) -> Result<Vec<Vec<f64>>, DatasetError> {
        let wanted: BTreeSet<usize> = orders.iter().copied().collect();
        self.records
            .iter()
            .map(|record| {
                let mut combined = Vec::new();
                for &t in &wanted {
                    let bins = record
                        .histograms
                        .get(&t)
                        .ok_or(DatasetError::MissingOrder(t))?;
                    combined.extend(block(bins, normalization));
                }
                Ok(combined)
            })
            .collect()
    }

    pub fn classes(&self) -> Vec<i32> {
        self.records.iter().map(|r| r.class).collect()
    }

    /// Orders present in every record (the usable ones).
    pub fn orders(&self) -> Vec<usize> {
        let mut common: Option<BTreeSet<usize>> = None;
        for record in &self.records {
            let orders: BTreeSet<usize> = record.histograms.keys().copied().collect();
            common = Some(match common {
                None => orders,
                Some(prev) => prev.intersection(&orders).copied().collect(),
            });
        }
        common.unwrap_or_default().into_iter().collect()
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes a dataset embedding as JSON lines: a header with the vocabulary,
/// then one record per graph holding raw bin counts.
pub fn save_embeddings(
    path: &Path,
    dataset_name: &str,
    embedding: &DatasetEmbedding,
    classes: &[i32],
) -> Result<(), DatasetError> {
    if classes.len() != embedding.embeddings.len() {
        return Err(DatasetError::LabelCount {
            expected: embedding.embeddings.len(),
            got: classes.len(),
        });
    }
    let vocabulary: Vec<String> = embedding
        .vocabulary
        .orders()
        .flat_map(|t| embedding.vocabulary.keys(t).to_vec())
        .collect();
    let header = EmbeddingHeader {
        format_version: EMBEDDING_FORMAT_VERSION,
        dataset: dataset_name.to_owned(),
        t_max: embedding.config.sampler.max_order,
        hash_function: embedding.config.hash_function,
        vocabulary,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writeln!(
        out,
        "{}",
        serde_json::to_string(&header).expect("header serializes")
    )
    .map_err(io_err(path))?;
    for (i, (e, &class)) in embedding.embeddings.iter().zip(classes).enumerate() {
        let histograms: BTreeMap<usize, Vec<u64>> = e
            .orders()
            .map(|t| (t, e.raw_counts(t).expect("own order").to_vec()))
            .collect();
        let record = EmbeddingRecord {
            graph_index: i,
            class,
            histograms,
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&record).expect("record serializes")
        )
        .map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

/// Reads an embedding file written by [`save_embeddings`].
pub fn load_embeddings(path: &Path) -> Result<LoadedEmbeddings, DatasetError> {
    let file = File::open(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            DatasetError::MissingFile(path.to_path_buf())
        } else {
            DatasetError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    let mut lines = BufReader::new(file).lines();
    let header_line = loop {
        match lines.next() {
            None => return Err(DatasetError::Corrupt("empty file".into())),
            Some(Err(source)) => {
                return Err(DatasetError::Io {
                    path: path.to_path_buf(),
                    source,
                })
            }
            Some(Ok(line)) if line.trim().is_empty() => continue,
            Some(Ok(line)) => break line,
        }
    };
    let header: EmbeddingHeader = serde_json::from_str(&header_line)
        .map_err(|e| DatasetError::Corrupt(format!("header: {e}")))?;
    if header.format_version != EMBEDDING_FORMAT_VERSION {
        return Err(DatasetError::Version {
            got: header.format_version,
            expected: EMBEDDING_FORMAT_VERSION,
        });
    }
    let vocabulary = Vocabulary::from_keys(header.vocabulary)
        .map_err(|e: EmbedError| DatasetError::Corrupt(e.to_string()))?;
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: EmbeddingRecord = serde_json::from_str(&line)
            .map_err(|e| DatasetError::Corrupt(format!("record {}: {e}", i + 1)))?;
        records.push(record);
    }
    Ok(LoadedEmbeddings {
        dataset: header.dataset,
        t_max: header.t_max,
        hash_function: header.hash_function,
        vocabulary,
        records,
    })
}

/// Writes a Gram matrix as plain text: row `i` holds the class label of item
/// `i` followed by the `n` kernel values, space-separated, full precision.
pub fn save_gram(path: &Path, gram: &GramMatrix, labels: &[i32]) -> Result<(), DatasetError> {
    if labels.len() != gram.n() {
        return Err(DatasetError::LabelCount {
            expected: gram.n(),
            got: labels.len(),
        });
    }
    for i in 0..gram.n() {
        for j in (i + 1)..gram.n() {
            let (a, b) = (gram.get(i, j), gram.get(j, i));
            if (a - b).abs() > SYMMETRY_TOL {
                return Err(KernelError::Asymmetric { i, j, a, b }.into());
            }
        }
    }
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for (i, &label) in labels.iter().enumerate() {
        write!(out, "{label}").map_err(io_err(path))?;
        for j in 0..gram.n() {
            write!(out, " {}", gram.get(i, j)).map_err(io_err(path))?;
        }
        writeln!(out).map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

/// Reads a Gram file written by [`save_gram`]. The kernel that produced the
/// values is not recorded in the format, so the matrix comes back with no
/// kernel descriptor.
pub fn load_gram(path: &Path) -> Result<(Vec<i32>, GramMatrix), DatasetError> {
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let lines = read_lines(path)?;
    let mut labels = Vec::with_capacity(lines.len());
    let mut rows = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let mut tokens = line.split_whitespace();
        let label = tokens.next().ok_or_else(|| DatasetError::Parse {
            file: file_name.clone(),
            line: i + 1,
            content: line.clone(),
        })?;
        labels.push(parse_i32(&file_name, i + 1, label)?);
        let row: Vec<f64> = tokens
            .map(|t| {
                t.parse().map_err(|_| DatasetError::Parse {
                    file: file_name.clone(),
                    line: i + 1,
                    content: t.to_owned(),
                })
            })
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    let gram = GramMatrix::from_rows(rows, None)?;
    Ok((labels, gram))
}
