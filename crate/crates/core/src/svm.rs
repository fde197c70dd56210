//! Support vector machine on precomputed Gram matrices.
//!
//! The dual problem is solved by sequential minimal optimization with
//! maximal-violating-pair selection: each step picks the worst pair of
//! box-feasible multipliers and solves their two-variable subproblem in
//! closed form. Multiclass problems train one-vs-all with ties broken toward
//! the smaller class id.

use crate::embed::derive_seed;
use crate::kernel::{gram_matrix, GramMatrix, KernelError, KernelKind};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SvmError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{labels} labels for {items} items")]
    SizeMismatch { items: usize, labels: usize },
    #[error("C must be positive, got {0}")]
    BadC(f64),
    #[error("binary training labels must be +1 or -1, got {0}")]
    BadLabel(i32),
    #[error("training set holds a single class")]
    OneClassOnly,
    #[error("need at least 2 folds, got {0}")]
    BadFolds(usize),
    #[error("class {class} has {count} items, fewer than {folds} folds")]
    ClassSmallerThanFolds {
        class: i32,
        count: usize,
        folds: usize,
    },
    #[error("C grid is empty")]
    EmptyCGrid,
}

/// Regularization grid searched during cross-validation.
pub const DEFAULT_C_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

/// KKT violation tolerance for convergence.
const KKT_TOL: f64 = 1e-3;
/// Two-variable steps before giving up.
const MAX_STEPS: usize = 200_000;
/// Minimum multiplier movement counted as progress.
const MIN_STEP: f64 = 1e-12;

/// Trained binary classifier. Multipliers index the training Gram matrix,
/// so prediction needs kernel values against every training item.
#[derive(Debug, Clone)]
pub struct SvmModel {
    alphas: Vec<f64>,
    /// Training labels as `+1.0` / `-1.0`.
    labels: Vec<f64>,
    bias: f64,
    c: f64,
    converged: bool,
}

impl SvmModel {
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// False when the step cap was hit before all KKT violations cleared;
    /// the model then holds the last iterate.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn support_count(&self) -> usize {
        self.alphas.iter().filter(|&&a| a > 0.0).count()
    }
}

/// Trains a binary soft-margin SVM on a precomputed Gram matrix.
///
/// `labels` must be `+1` / `-1` with both classes present.
pub fn svm_train(gram: &GramMatrix, labels: &[i32], c: f64) -> Result<SvmModel, SvmError> {
    train_impl(gram, labels, c, MAX_STEPS)
}

/// Solver state: bias-free decision values and the box-feasibility sets.
///
/// `v[i] = y_i - sum_j alpha_j y_j K_ij`. The dual optimum is reached when
/// `max v` over the up-set minus `min v` over the down-set is within
/// tolerance; the up-set holds indices whose multiplier can push its class
/// score up, the down-set those that can push it down.
struct Solver<'a> {
    gram: &'a GramMatrix,
    y: Vec<f64>,
    c: f64,
    alphas: Vec<f64>,
    v: Vec<f64>,
}

/// Indices paired with their `v` values, sorted by violation severity.
type Ranked = Vec<(usize, f64)>;

impl Solver<'_> {
    fn in_up_set(&self, k: usize) -> bool {
        if self.y[k] > 0.0 {
            self.alphas[k] < self.c
        } else {
            self.alphas[k] > 0.0
        }
    }

    fn in_down_set(&self, k: usize) -> bool {
        if self.y[k] > 0.0 {
            self.alphas[k] > 0.0
        } else {
            self.alphas[k] < self.c
        }
    }

    /// Candidates sorted most-violating first; ties fall to smaller index.
    fn violation_order(&self) -> (Ranked, Ranked) {
        let n = self.y.len();
        let mut ups: Ranked = (0..n)
            .filter(|&k| self.in_up_set(k))
            .map(|k| (k, self.v[k]))
            .collect();
        let mut downs: Ranked = (0..n)
            .filter(|&k| self.in_down_set(k))
            .map(|k| (k, self.v[k]))
            .collect();
        ups.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        downs.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        (ups, downs)
    }

    /// Closed-form update of the pair `(i, j)` under the box and equality
    /// constraints. Returns whether the multipliers moved.
    fn step(&mut self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let (yi, yj) = (self.y[i], self.y[j]);
        let (ai, aj) = (self.alphas[i], self.alphas[j]);
        let c = self.c;
        let (lo, hi) = if yi != yj {
            ((aj - ai).max(0.0), (c + aj - ai).min(c))
        } else {
            ((ai + aj - c).max(0.0), (ai + aj).min(c))
        };
        if hi - lo < MIN_STEP {
            return false;
        }
        let eta = self.gram.get(i, i) + self.gram.get(j, j) - 2.0 * self.gram.get(i, j);
        if eta <= 0.0 {
            // Coincident points in feature space; the caller tries the next
            // violating partner.
            return false;
        }
        // With errors e = f - y this is the classic a_j + y_j(e_i - e_j)/eta,
        // rewritten for v = -e.
        let aj_new = (aj + yj * (self.v[j] - self.v[i]) / eta).clamp(lo, hi);
        if (aj_new - aj).abs() < MIN_STEP {
            return false;
        }
        // Cancellation leaves dust like 1e-18 on multipliers that should sit
        // exactly at a bound, which then wedges the working-set selection;
        // snap anything within a relative hair of the box onto it.
        let snap = |a: f64| {
            if a < c * 1e-10 {
                0.0
            } else if a > c * (1.0 - 1e-10) {
                c
            } else {
                a
            }
        };
        let aj_new = snap(aj_new);
        if (aj_new - aj).abs() < MIN_STEP {
            return false;
        }
        let ai_new = snap(ai + yi * yj * (aj - aj_new));
        let (di, dj) = (yi * (ai_new - ai), yj * (aj_new - aj));
        for k in 0..self.v.len() {
            self.v[k] -= di * self.gram.get(i, k) + dj * self.gram.get(j, k);
        }
        self.alphas[i] = ai_new;
        self.alphas[j] = aj_new;
        true
    }

    /// Bias from free support vectors, falling back to the midpoint of the
    /// optimality interval.
    fn bias(&self) -> f64 {
        let free: Vec<f64> = (0..self.y.len())
            .filter(|&k| self.alphas[k] > 0.0 && self.alphas[k] < self.c)
            .map(|k| self.v[k])
            .collect();
        if !free.is_empty() {
            return free.iter().sum::<f64>() / free.len() as f64;
        }
        let (ups, downs) = self.violation_order();
        match (ups.first(), downs.first()) {
            (Some(&(_, m)), Some(&(_, mm))) => 0.5 * (m + mm),
            (Some(&(_, m)), None) => m,
            (None, Some(&(_, mm))) => mm,
            (None, None) => 0.0,
        }
    }
}

fn train_impl(
    gram: &GramMatrix,
    labels: &[i32],
    c: f64,
    max_steps: usize,
) -> Result<SvmModel, SvmError> {
    let n = gram.n();
    if labels.len() != n {
        return Err(SvmError::SizeMismatch {
            items: n,
            labels: labels.len(),
        });
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(SvmError::BadC(c));
    }
    let mut y = Vec::with_capacity(n);
    for &label in labels {
        match label {
            1 | -1 => y.push(label as f64),
            other => return Err(SvmError::BadLabel(other)),
        }
    }
    if y.iter().all(|&v| v > 0.0) || y.iter().all(|&v| v < 0.0) {
        return Err(SvmError::OneClassOnly);
    }

    let v = y.clone();
    let mut solver = Solver {
        gram,
        y,
        c,
        alphas: vec![0.0; n],
        v,
    };
    let mut converged = false;
    for _ in 0..max_steps {
        let (ups, downs) = solver.violation_order();
        let (Some(&(_, m)), Some(&(_, mm))) = (ups.first(), downs.first()) else {
            // One set drained: optimality holds vacuously.
            converged = true;
            break;
        };
        if m - mm <= KKT_TOL {
            converged = true;
            break;
        }
        // The maximal violating pair first; if its subproblem cannot move
        // (degenerate direction), fall through the next-worst pairs.
        let mut moved = false;
        'pairs: for &(i, vi) in &ups {
            if vi - mm <= KKT_TOL {
                break;
            }
            for &(j, vj) in &downs {
                if vi - vj <= KKT_TOL {
                    break;
                }
                if solver.step(i, j) {
                    moved = true;
                    break 'pairs;
                }
            }
        }
        if !moved {
            // No violating pair can make progress; stop without claiming
            // convergence.
            break;
        }
    }
    let bias = solver.bias();
    Ok(SvmModel {
        alphas: solver.alphas,
        labels: solver.y,
        bias,
        c,
        converged,
    })
}

fn decision(model: &SvmModel, kernel_row: &[f64]) -> f64 {
    model
        .alphas
        .iter()
        .zip(&model.labels)
        .zip(kernel_row)
        .map(|((&a, &y), &k)| a * y * k)
        .sum::<f64>()
        + model.bias
}

/// Decision value for one item from its kernel row against the training set.
pub fn svm_predict(model: &SvmModel, kernel_row: &[f64]) -> f64 {
    assert_eq!(
        kernel_row.len(),
        model.alphas.len(),
        "kernel row must cover every training item"
    );
    decision(model, kernel_row)
}

/// One-vs-all wrapper over binary models; also handles the plain binary case
/// with a single model.
#[derive(Debug, Clone)]
struct MultiModel {
    /// Distinct class ids, ascending.
    classes: Vec<i32>,
    models: Vec<SvmModel>,
}

impl MultiModel {
    fn train(gram: &GramMatrix, labels: &[i32], c: f64) -> Result<MultiModel, SvmError> {
        let mut classes: Vec<i32> = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        if classes.len() < 2 {
            return Err(SvmError::OneClassOnly);
        }
        let models = if classes.len() == 2 {
            let positive = classes[1];
            let binary: Vec<i32> = labels
                .iter()
                .map(|&l| if l == positive { 1 } else { -1 })
                .collect();
            vec![svm_train(gram, &binary, c)?]
        } else {
            // Independent binary subproblems; solve them concurrently.
            classes
                .par_iter()
                .map(|&class| {
                    let binary: Vec<i32> = labels
                        .iter()
                        .map(|&l| if l == class { 1 } else { -1 })
                        .collect();
                    svm_train(gram, &binary, c)
                })
                .collect::<Result<_, _>>()?
        };
        Ok(MultiModel { classes, models })
    }

    fn predict(&self, kernel_row: &[f64]) -> i32 {
        if self.models.len() == 1 {
            let score = svm_predict(&self.models[0], kernel_row);
            return if score > 0.0 {
                self.classes[1]
            } else {
                self.classes[0]
            };
        }
        // Highest one-vs-all score wins; ties fall to the smaller class id
        // because strict inequality is required to displace the leader.
        let mut best = (self.classes[0], f64::NEG_INFINITY);
        for (class, model) in self.classes.iter().zip(&self.models) {
            let score = svm_predict(model, kernel_row);
            if score > best.1 {
                best = (*class, score);
            }
        }
        best.0
    }

    fn converged(&self) -> bool {
        self.models.iter().all(SvmModel::converged)
    }
}

/// Cross-validation outcome over all folds.
#[derive(Debug, Clone)]
pub struct CvReport {
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Population standard deviation across folds.
    pub std_accuracy: f64,
    /// C picked per fold on the inner validation split.
    pub chosen_c: Vec<f64>,
    pub all_converged: bool,
}

/// Stratified k-fold cross-validation over feature vectors.
pub fn cross_validate(
    features: &[Vec<f64>],
    labels: &[i32],
    kernel: KernelKind,
    folds: usize,
    c_grid: &[f64],
    seed: u64,
) -> Result<CvReport, SvmError> {
    let gram = gram_matrix(features, kernel)?;
    cross_validate_gram(&gram, labels, folds, c_grid, seed)
}

/// Stratified k-fold cross-validation on a precomputed Gram matrix.
///
/// Per fold, C is chosen on a stratified 80/20 split of the training part
/// (grid ties go to the earliest entry), then a final model is trained on the
/// full training part and scored on the held-out fold. Deterministic in
/// `seed`.
pub fn cross_validate_gram(
    gram: &GramMatrix,
    labels: &[i32],
    folds: usize,
    c_grid: &[f64],
    seed: u64,
) -> Result<CvReport, SvmError> {
    let n = gram.n();
    if labels.len() != n {
        return Err(SvmError::SizeMismatch {
            items: n,
            labels: labels.len(),
        });
    }
    if folds < 2 {
        return Err(SvmError::BadFolds(folds));
    }
    if c_grid.is_empty() {
        return Err(SvmError::EmptyCGrid);
    }
    for &c in c_grid {
        if !(c > 0.0 && c.is_finite()) {
            return Err(SvmError::BadC(c));
        }
    }

    let mut by_class: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    if by_class.len() < 2 {
        return Err(SvmError::OneClassOnly);
    }
    for (&class, members) in &by_class {
        if members.len() < folds {
            return Err(SvmError::ClassSmallerThanFolds {
                class,
                count: members.len(),
                folds,
            });
        }
    }

    // Shuffle within each class, then deal round-robin so every fold gets a
    // near-equal share of each class.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; n];
    for members in by_class.values() {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        for (pos, &idx) in shuffled.iter().enumerate() {
            fold_of[idx] = pos % folds;
        }
    }

    let mut fold_accuracies = Vec::with_capacity(folds);
    let mut chosen_c = Vec::with_capacity(folds);
    let mut all_converged = true;
    for fold in 0..folds {
        let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == fold).collect();
        let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != fold).collect();
        let train_labels: Vec<i32> = train.iter().map(|&i| labels[i]).collect();
        let train_gram = gram.submatrix(&train);

        let best_c = if c_grid.len() == 1 {
            c_grid[0]
        } else {
            select_c(
                &train_gram,
                &train_labels,
                c_grid,
                derive_seed(seed, 1 + fold as u64),
            )?
        };
        chosen_c.push(best_c);

        let model = MultiModel::train(&train_gram, &train_labels, best_c)?;
        all_converged &= model.converged();
        let hits = test
            .iter()
            .filter(|&&i| {
                let row: Vec<f64> = train.iter().map(|&j| gram.get(i, j)).collect();
                model.predict(&row) == labels[i]
            })
            .count();
        fold_accuracies.push(hits as f64 / test.len() as f64);
    }

    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / folds as f64;
    let variance = fold_accuracies
        .iter()
        .map(|a| (a - mean_accuracy).powi(2))
        .sum::<f64>()
        / folds as f64;
    Ok(CvReport {
        fold_accuracies,
        mean_accuracy,
        std_accuracy: variance.sqrt(),
        chosen_c,
        all_converged,
    })
}

/// Picks C on a stratified 80/20 split of the (already fold-local) training
/// set. Ties keep the earliest grid entry.
fn select_c(
    gram: &GramMatrix,
    labels: &[i32],
    c_grid: &[f64],
    seed: u64,
) -> Result<f64, SvmError> {
    let mut by_class: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut val = Vec::new();
    let mut inner = Vec::new();
    for members in by_class.values() {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        // A singleton class stays in the inner training set; every binary
        // subproblem needs both classes present.
        let take = if shuffled.len() == 1 {
            0
        } else {
            (shuffled.len() / 5).max(1)
        };
        val.extend_from_slice(&shuffled[..take]);
        inner.extend_from_slice(&shuffled[take..]);
    }
    val.sort_unstable();
    inner.sort_unstable();
    if val.is_empty() {
        return Ok(c_grid[0]);
    }

    let inner_labels: Vec<i32> = inner.iter().map(|&i| labels[i]).collect();
    let inner_gram = gram.submatrix(&inner);
    let mut best = (c_grid[0], -1.0);
    for &c in c_grid {
        let model = MultiModel::train(&inner_gram, &inner_labels, c)?;
        let hits = val
            .iter()
            .filter(|&&i| {
                let row: Vec<f64> = inner.iter().map(|&j| gram.get(i, j)).collect();
                model.predict(&row) == labels[i]
            })
            .count();
        let acc = hits as f64 / val.len() as f64;
        if acc > best.1 {
            best = (c, acc);
        }
    }
    Ok(best.0)
}
