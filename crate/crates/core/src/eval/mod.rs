//! Clustering accuracy, stage timing and empirical checks of the
//! representation-error bounds.

mod bounds;
mod hungarian;

pub use bounds::{
    bound_params, corollary1_bound, corollary1_rhs, corollary2_bound, corollary2_rhs, theorem1_bound, theorem1_rhs,
    BoundCheck, BoundParams,
};
pub use hungarian::max_weight_assignment;

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Result};
use crate::linalg::{numerical_rank, singular_values};
use crate::spectral::ClusterAssignment;

/// Fraction of points whose predicted label maps to the true label under the
/// best one-to-one relabeling.
pub fn clustering_accuracy(pred: &ClusterAssignment, truth: &[usize]) -> Result<f64> {
    accuracy(&pred.labels, truth)
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(mismatch(format!("{} predictions for {} labels", pred.len(), truth.len())));
    }
    if pred.is_empty() {
        return Ok(1.0);
    }
    let p = dense_ids(pred);
    let t = dense_ids(truth);
    let m = 1 + p.iter().chain(&t).copied().max().unwrap_or(0);
    let mut counts = vec![vec![0i64; m]; m];
    for (&a, &b) in p.iter().zip(&t) {
        counts[a][b] += 1;
    }
    let matching = max_weight_assignment(&counts);
    let matched: i64 = matching.iter().enumerate().map(|(i, &j)| counts[i][j]).sum();
    Ok(matched as f64 / pred.len() as f64)
}

/// Relabels to `0..m` in order of first appearance.
fn dense_ids(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Whether `X`, `B` and `[X | B]` have the same numerical rank, each at
/// threshold `rank_tol · σ_max` of that matrix.
pub fn check_range_preservation(x: &DMatrix<f64>, b: &DMatrix<f64>, rank_tol: f64) -> bool {
    if x.nrows() != b.nrows() {
        return false;
    }
    let mut joined = DMatrix::zeros(x.nrows(), x.ncols() + b.ncols());
    joined.columns_mut(0, x.ncols()).copy_from(x);
    joined.columns_mut(x.ncols(), b.ncols()).copy_from(b);
    let rx = numerical_rank(x, rank_tol);
    rx == numerical_rank(b, rank_tol) && rx == numerical_rank(&joined, rank_tol)
}

/// Fraction of column pairs `i < j` with `‖a_i − a_j‖ / ‖z_i − z_j‖` in
/// `[lo, hi]`. Pairs with `‖z_i − z_j‖ ≤ 1e-12` are skipped; with no pairs
/// left the fraction is 1.
pub fn check_distance_preservation(z: &DMatrix<f64>, a: &DMatrix<f64>, band: (f64, f64)) -> Result<f64> {
    if z.ncols() != a.ncols() {
        return Err(mismatch(format!("{} z-columns vs {} a-columns", z.ncols(), a.ncols())));
    }
    let (mut total, mut inside) = (0usize, 0usize);
    for i in 0..z.ncols() {
        for j in i + 1..z.ncols() {
            let dz = (z.column(i) - z.column(j)).norm();
            if dz <= 1e-12 {
                continue;
            }
            let ratio = (a.column(i) - a.column(j)).norm() / dz;
            total += 1;
            if ratio >= band.0 && ratio <= band.1 {
                inside += 1;
            }
        }
    }
    Ok(if total == 0 { 1.0 } else { inside as f64 / total as f64 })
}

/// `σ_{r+1}` of `x` (0-based index `r`), or 0 past the end.
pub(crate) fn singular_value(x: &DMatrix<f64>, r: usize) -> f64 {
    singular_values(x).get(r).copied().unwrap_or(0.0)
}

/// Wall-clock seconds per pipeline stage. Sketch generation and the
/// products `XR`, `ŘᵀX` count towards `sketch`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub sketch: f64,
    pub solve: f64,
    pub graph: f64,
    pub spectral: f64,
}

impl StageTimes {
    pub fn total(&self) -> f64 {
        self.sketch + self.solve + self.graph + self.spectral
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Sketch,
    Solve,
    Graph,
    Spectral,
}

/// Accumulates elapsed time into [`StageTimes`].
#[derive(Debug, Default)]
pub struct StageTimer {
    times: StageTimes,
}

impl StageTimer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed().as_secs_f64();
        let slot = match stage {
            Stage::Sketch => &mut self.times.sketch,
            Stage::Solve => &mut self.times.solve,
            Stage::Graph => &mut self.times.graph,
            Stage::Spectral => &mut self.times.spectral,
        };
        *slot += elapsed;
        out
    }

    pub fn times(&self) -> StageTimes {
        self.times
    }
}

/// Metrics and run parameters of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// `None` when the input has no ground-truth labels.
    pub accuracy: Option<f64>,
    pub wall_time_s: StageTimes,
    pub n: usize,
    pub d: Option<usize>,
    pub k: usize,
    pub lambda: f64,
    pub seed: u64,
}
