//! Solvers for the sketched self-expression objective
//!
//! ```text
//!     min_A  h(A) + (λ/2)·‖X − BA‖²_F
//! ```
//!
//! with `h = ½‖·‖²_F` (Sketch-LSR, closed form), `h = ‖·‖₁` (Sketch-SSC, ADMM)
//! or `h = ‖·‖_*` (Sketch-LRR, inexact ALM). `X` is `D × N`, the dictionary
//! `B` is `D × n` and the returned coefficients `A` are `n × N`.

mod lrr;
mod lsr;
mod prox;
mod ssc;

pub use lrr::solve_sketch_lrr;
pub use lsr::{solve_batch_lsr, solve_sketch_lsr};
pub use prox::{soft_threshold, soft_threshold_matrix, svt};
pub use ssc::solve_sketch_ssc;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(rename = "lsr")]
    SketchLsr,
    #[serde(rename = "ssc")]
    SketchSsc,
    #[serde(rename = "lrr")]
    SketchLrr,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SketchLsr => "lsr",
            Self::SketchSsc => "ssc",
            Self::SketchLrr => "lrr",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().trim_start_matches("sketch-") {
            "lsr" => Ok(Self::SketchLsr),
            "ssc" => Ok(Self::SketchSsc),
            "lrr" => Ok(Self::SketchLrr),
            other => Err(invalid(format!("unknown method {other:?} (expected lsr, ssc or lrr)"))),
        }
    }
}

/// Regularization weight and iteration knobs.
///
/// `nu0`, `nu_max` and `p` drive the penalty schedule `ν ← min(pν, ν_max)`
/// of the LRR solver; the SSC solver keeps `ν = nu0` fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub lambda: f64,
    pub nu0: f64,
    pub nu_max: f64,
    pub p: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl SolverConfig {
    pub const DEFAULT_TOL: f64 = 1e-6;
    pub const DEFAULT_MAX_ITER: usize = 500;

    /// ADMM defaults: fixed `ν = 1`.
    pub fn ssc(lambda: f64) -> Self {
        Self {
            lambda,
            nu0: 1.0,
            nu_max: 1.0,
            p: 1.1,
            tol: Self::DEFAULT_TOL,
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }

    /// Inexact-ALM defaults: `ν₀ = 1e-2`, `p = 1.1`, `ν_max = 1e6`.
    pub fn lrr(lambda: f64) -> Self {
        Self {
            lambda,
            nu0: 1e-2,
            nu_max: 1e6,
            p: 1.1,
            tol: Self::DEFAULT_TOL,
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }

    pub fn for_method(method: Method, lambda: f64) -> Self {
        match method {
            Method::SketchLrr => Self::lrr(lambda),
            Method::SketchLsr | Method::SketchSsc => Self::ssc(lambda),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.lambda) {
            return Err(invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !pos(self.nu0) || !pos(self.nu_max) {
            return Err(invalid("nu0 and nu_max must be positive"));
        }
        if self.nu0 > self.nu_max {
            return Err(invalid(format!(
                "nu0 = {} exceeds nu_max = {}",
                self.nu0, self.nu_max
            )));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(invalid(format!("p must exceed 1, got {}", self.p)));
        }
        if !pos(self.tol) {
            return Err(invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be ≥ 1"));
        }
        Ok(())
    }
}

/// Per-run solver diagnostics.
///
/// `final_primal_residual` is the relative residual the stopping rule
/// tests: `‖a − c‖₂ / max(1, ‖a‖₂)` (worst column) for SSC and
/// `‖A − C‖_F / max(1, ‖A‖_F)` for LRR, so `converged` implies it is `≤ tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    pub final_primal_residual: f64,
    pub objective_value: f64,
    pub converged: bool,
    pub wall_time_s: f64,
    /// Columns that hit `max_iter` (SSC only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unconverged_columns: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CoefficientMatrix {
    pub values: DMatrix<f64>,
    pub method: Method,
    pub diagnostics: SolveDiagnostics,
}

/// `h(A) + (λ/2)‖X − BA‖²_F` for the given regularizer.
pub fn objective(method: Method, x: &DMatrix<f64>, b: &DMatrix<f64>, a: &DMatrix<f64>, lambda: f64) -> f64 {
    let fit = 0.5 * lambda * (x - b * a).norm_squared();
    let reg = match method {
        Method::SketchLsr => 0.5 * a.norm_squared(),
        Method::SketchSsc => a.iter().map(|v| v.abs()).sum(),
        Method::SketchLrr => nuclear_norm(a),
    };
    reg + fit
}

pub fn nuclear_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().sum()
}

/// Dispatches on `method`.
pub fn solve(method: Method, x: &DMatrix<f64>, b: &DMatrix<f64>, cfg: &SolverConfig) -> Result<CoefficientMatrix> {
    match method {
        Method::SketchLsr => solve_sketch_lsr(x, b, cfg.lambda),
        Method::SketchSsc => solve_sketch_ssc(x, b, cfg),
        Method::SketchLrr => solve_sketch_lrr(x, b, cfg),
    }
}

fn check_dims(x: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if x.nrows() != b.nrows() {
        return Err(mismatch(format!(
            "X has {} rows but the dictionary has {}",
            x.nrows(),
            b.nrows()
        )));
    }
    if b.ncols() == 0 || x.ncols() == 0 {
        return Err(invalid("empty data or dictionary"));
    }
    Ok(())
}

/// Cholesky factor of `λBᵀB + νI`.
fn regularized_gram(b: &DMatrix<f64>, lambda: f64, nu: f64) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let mut g = b.tr_mul(b) * lambda;
    for i in 0..g.nrows() {
        g[(i, i)] += nu;
    }
    g.cholesky()
        .ok_or_else(|| Error::Numerical("λBᵀB + νI is not positive definite (non-finite input?)".into()))
}

fn check_finite(a: &DMatrix<f64>, what: &str) -> Result<()> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical(format!("{what} produced non-finite coefficients")))
    }
}
