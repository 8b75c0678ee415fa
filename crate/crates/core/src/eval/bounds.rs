use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::singular_value;
use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::numerical_rank;

/// Relative threshold for the rank `ρ` of the data matrix.
const RANK_TOL: f64 = 1e-10;

/// Quantities entering the representation-error bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub rho: usize,
    pub r: usize,
    pub n: usize,
    pub epsilon: f64,
    pub lambda: f64,
    /// `σ_{r+1}(X)`.
    pub sigma_r1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub params: BoundParams,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64, params: BoundParams) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs,
            params,
        }
    }
}

/// Reads `ρ = rank(X)` and `σ_{r+1}` off the SVD of `x`.
pub fn bound_params(x: &DMatrix<f64>, r: usize, n: usize, lambda: f64, epsilon: f64) -> Result<BoundParams> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    let rho = numerical_rank(x, RANK_TOL);
    if r >= rho {
        return Err(Error::DegenerateBound { r, rank: rho });
    }
    Ok(BoundParams {
        rho,
        r,
        n,
        epsilon,
        lambda,
        sigma_r1: singular_value(x, r),
    })
}

/// `√((1+ε)/(1−ε)) · √(ρ−r) · σ²_{r+1}`.
fn tail(p: &BoundParams) -> f64 {
    ((1.0 + p.epsilon) / (1.0 - p.epsilon)).sqrt() * ((p.rho - p.r) as f64).sqrt() * p.sigma_r1 * p.sigma_r1
}

/// Sketch-LSR, per column: `λ(1 + tail) + 1/√(1−ε)`.
pub fn theorem1_rhs(p: &BoundParams) -> f64 {
    p.lambda * (1.0 + tail(p)) + 1.0 / (1.0 - p.epsilon).sqrt()
}

/// Sketch-SSC, per column: `λ(1 + tail) + √(n/(1−ε))`.
pub fn corollary1_rhs(p: &BoundParams) -> f64 {
    p.lambda * (1.0 + tail(p)) + (p.n as f64 / (1.0 - p.epsilon)).sqrt()
}

/// Sketch-LRR, whole batch of `big_n` columns: `λ(√N + tail) + √(n/(1−ε))`.
pub fn corollary2_rhs(p: &BoundParams, big_n: usize) -> f64 {
    p.lambda * ((big_n as f64).sqrt() + tail(p)) + (p.n as f64 / (1.0 - p.epsilon)).sqrt()
}

/// Residuals `x_j − B â_j` with `B = XR`.
fn residual(x: &DMatrix<f64>, b: &DMatrix<f64>, a_hat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if b.nrows() != x.nrows() || a_hat.nrows() != b.ncols() || a_hat.ncols() != x.ncols() {
        return Err(mismatch(format!(
            "X {}×{}, B {}×{}, Â {}×{} do not fit X ≈ BÂ",
            x.nrows(),
            x.ncols(),
            b.nrows(),
            b.ncols(),
            a_hat.nrows(),
            a_hat.ncols()
        )));
    }
    Ok(x - b * a_hat)
}

/// Per-column check of `‖x − XRâ‖₂` against [`theorem1_rhs`].
pub fn theorem1_bound(
    x: &DMatrix<f64>,
    b: &DMatrix<f64>,
    a_hat: &DMatrix<f64>,
    r: usize,
    lambda: f64,
    epsilon: f64,
) -> Result<Vec<BoundCheck>> {
    per_column(x, b, a_hat, r, lambda, epsilon, theorem1_rhs)
}

/// Per-column check of `‖x − XRâ‖₂` against [`corollary1_rhs`].
pub fn corollary1_bound(
    x: &DMatrix<f64>,
    b: &DMatrix<f64>,
    a_hat: &DMatrix<f64>,
    r: usize,
    lambda: f64,
    epsilon: f64,
) -> Result<Vec<BoundCheck>> {
    per_column(x, b, a_hat, r, lambda, epsilon, corollary1_rhs)
}

/// Frobenius check of `‖X − XRÂ‖_F` against [`corollary2_rhs`].
pub fn corollary2_bound(
    x: &DMatrix<f64>,
    b: &DMatrix<f64>,
    a_hat: &DMatrix<f64>,
    r: usize,
    lambda: f64,
    epsilon: f64,
) -> Result<BoundCheck> {
    let res = residual(x, b, a_hat)?;
    let p = bound_params(x, r, b.ncols(), lambda, epsilon)?;
    Ok(BoundCheck::new(res.norm(), corollary2_rhs(&p, x.ncols()), p))
}

fn per_column(
    x: &DMatrix<f64>,
    b: &DMatrix<f64>,
    a_hat: &DMatrix<f64>,
    r: usize,
    lambda: f64,
    epsilon: f64,
    rhs: fn(&BoundParams) -> f64,
) -> Result<Vec<BoundCheck>> {
    let res = residual(x, b, a_hat)?;
    let p = bound_params(x, r, b.ncols(), lambda, epsilon)?;
    let bound = rhs(&p);
    Ok(res.column_iter().map(|c| BoundCheck::new(c.norm(), bound, p)).collect())
}
