use std::time::Instant;

use nalgebra::DMatrix;

use super::prox::svt;
use super::{check_dims, check_finite, objective, regularized_gram, CoefficientMatrix, Method, SolveDiagnostics, SolverConfig};
use crate::error::Result;

/// Inexact augmented Lagrangian method for `min ‖A‖_* + (λ/2)‖X − BA‖²_F`.
///
/// With splitting `A = C` and scaled dual `Δ`:
///
/// ```text
///     A ← (λBᵀB + νI)⁻¹ (λBᵀX + ν(C − Δ))
///     C ← SVT_{1/ν}(A + Δ)
///     Δ ← Δ + A − C
///     ν ← min(pν, ν_max)
/// ```
///
/// The `+ν(C − Δ)` sign is the stationarity condition of the augmented
/// Lagrangian `(λ/2)‖X − BA‖² + ‖C‖_* + (ν/2)‖A − C + Δ‖²`. `Δ` is the
/// multiplier divided by `ν`, so it is rescaled by `ν_old/ν_new` whenever the
/// penalty grows. The system is refactorized whenever `ν` changes.
pub fn solve_sketch_lrr(x: &DMatrix<f64>, b: &DMatrix<f64>, cfg: &SolverConfig) -> Result<CoefficientMatrix> {
    check_dims(x, b)?;
    cfg.validate()?;
    let start = Instant::now();
    let (n, cols) = (b.ncols(), x.ncols());
    let btx = b.tr_mul(x) * cfg.lambda;
    let mut nu = cfg.nu0;
    let mut chol = regularized_gram(b, cfg.lambda, nu)?;
    let mut c = DMatrix::zeros(n, cols);
    let mut delta = DMatrix::zeros(n, cols);
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iter {
        iterations = it;
        let mut a = &btx + (&c - &delta) * nu;
        chol.solve_mut(&mut a);
        c = svt(&(&a + &delta), 1.0 / nu)?;
        let gap = &a - &c;
        delta += &gap;
        residual = gap.norm() / a.norm().max(1.0);
        if residual <= cfg.tol {
            converged = true;
            break;
        }
        let next = (cfg.p * nu).min(cfg.nu_max);
        if next != nu {
            delta *= nu / next;
            nu = next;
            chol = regularized_gram(b, cfg.lambda, nu)?;
        }
    }

    check_finite(&c, "Sketch-LRR")?;
    let objective_value = objective(Method::SketchLrr, x, b, &c, cfg.lambda);
    Ok(CoefficientMatrix {
        values: c,
        method: Method::SketchLrr,
        diagnostics: SolveDiagnostics {
            iterations,
            final_primal_residual: residual,
            objective_value,
            converged,
            wall_time_s: start.elapsed().as_secs_f64(),
            unconverged_columns: Vec::new(),
        },
    })
}
