//! Kernels over embedding vectors and Gram-matrix construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("negative entry {value} at index {index}; histograms must be non-negative")]
    NegativeEntry { index: usize, value: f64 },
    #[error("zero vector has no cosine direction")]
    ZeroVector,
    #[error("row {row} has {got} values; expected {expected}")]
    NotSquare {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("asymmetric at ({i}, {j}): {a} vs {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
}

/// Tolerance within which a Gram matrix must be symmetric.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// The two similarity measures used over embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// `sum_i min(x_i, y_i)`; positive semi-definite on histograms.
    #[serde(rename = "hi")]
    HistogramIntersection,
    #[serde(rename = "cosine")]
    Cosine,
}

impl KernelKind {
    pub fn apply(self, x: &[f64], y: &[f64]) -> Result<f64, KernelError> {
        match self {
            KernelKind::HistogramIntersection => hi_kernel(x, y),
            KernelKind::Cosine => cosine_sim(x, y),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::HistogramIntersection => "hi",
            KernelKind::Cosine => "cosine",
        })
    }
}

impl FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hi" | "histogram-intersection" => Ok(KernelKind::HistogramIntersection),
            "cosine" => Ok(KernelKind::Cosine),
            other => Err(format!("unknown kernel {other:?}; expected hi or cosine")),
        }
    }
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<(), KernelError> {
    if x.len() != y.len() {
        return Err(KernelError::LengthMismatch(x.len(), y.len()));
    }
    Ok(())
}

/// Histogram intersection: `sum_i min(x_i, y_i)` over non-negative vectors.
pub fn hi_kernel(x: &[f64], y: &[f64]) -> Result<f64, KernelError> {
    check_lengths(x, y)?;
    for v in [x, y] {
        if let Some(index) = v.iter().position(|&e| e < 0.0) {
            return Err(KernelError::NegativeEntry {
                index,
                value: v[index],
            });
        }
    }
    Ok(x.iter().zip(y).map(|(&a, &b)| a.min(b)).sum())
}

/// Cosine similarity, clamped into `[-1, 1]` against rounding spill.
pub fn cosine_sim(x: &[f64], y: &[f64]) -> Result<f64, KernelError> {
    check_lengths(x, y)?;
    let dot: f64 = x.iter().zip(y).map(|(&a, &b)| a * b).sum();
    let nx: f64 = x.iter().map(|&a| a * a).sum::<f64>().sqrt();
    let ny: f64 = y.iter().map(|&b| b * b).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(KernelError::ZeroVector);
    }
    Ok((dot / (nx * ny)).clamp(-1.0, 1.0))
}

/// Symmetric matrix of pairwise kernel values.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    /// Row-major `n * n` values.
    values: Vec<f64>,
    /// `None` for matrices loaded from disk, where the kernel is unknown.
    kernel: Option<KernelKind>,
    ids: Vec<String>,
}

impl GramMatrix {
    /// Validates squareness and symmetry (within [`SYMMETRY_TOL`]) of
    /// caller-supplied rows.
    pub fn from_rows(rows: Vec<Vec<f64>>, kernel: Option<KernelKind>) -> Result<GramMatrix, KernelError> {
        let n = rows.len();
        for (row, values) in rows.iter().enumerate() {
            if values.len() != n {
                return Err(KernelError::NotSquare {
                    row,
                    got: values.len(),
                    expected: n,
                });
            }
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        let gram = GramMatrix {
            n,
            values,
            kernel,
            ids: (0..n).map(|i| i.to_string()).collect(),
        };
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (gram.get(i, j), gram.get(j, i));
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(KernelError::Asymmetric { i, j, a, b });
                }
            }
        }
        Ok(gram)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn kernel(&self) -> Option<KernelKind> {
        self.kernel
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Largest `|K_ij - K_ji|`; zero for kernels built here.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Principal submatrix over the given item indices, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> GramMatrix {
        let n = indices.len();
        let mut values = Vec::with_capacity(n * n);
        for &i in indices {
            for &j in indices {
                values.push(self.get(i, j));
            }
        }
        GramMatrix {
            n,
            values,
            kernel: self.kernel,
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
        }
    }
}

/// Pairwise kernel values of uniformly sized vectors, rows in parallel.
///
/// Exactly symmetric: `k(x, y)` and `k(y, x)` run the identical float
/// operations in the identical order for both kernels.
pub fn gram_matrix(vectors: &[Vec<f64>], kernel: KernelKind) -> Result<GramMatrix, KernelError> {
    if let Some(first) = vectors.first() {
        for v in vectors {
            check_lengths(first, v)?;
        }
    }
    let rows: Vec<Vec<f64>> = vectors
        .par_iter()
        .map(|x| vectors.iter().map(|y| kernel.apply(x, y)).collect())
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    Ok(GramMatrix {
        n,
        values: rows.into_iter().flatten().collect(),
        kernel: Some(kernel),
        ids: (0..n).map(|i| i.to_string()).collect(),
    })
}
