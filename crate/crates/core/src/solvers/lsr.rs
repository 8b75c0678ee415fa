use std::time::Instant;

use nalgebra::DMatrix;

use super::{check_dims, check_finite, objective, regularized_gram, CoefficientMatrix, Method, SolveDiagnostics};
use crate::error::{invalid, Result};

/// `A = λ(λBᵀB + I)⁻¹BᵀX` via a Cholesky factorization of the `n × n` system.
pub fn solve_sketch_lsr(x: &DMatrix<f64>, b: &DMatrix<f64>, lambda: f64) -> Result<CoefficientMatrix> {
    check_dims(x, b)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    let start = Instant::now();
    let chol = regularized_gram(b, lambda, 1.0)?;
    let mut a = b.tr_mul(x) * lambda;
    chol.solve_mut(&mut a);
    check_finite(&a, "Sketch-LSR")?;
    let objective_value = objective(Method::SketchLsr, x, b, &a, lambda);
    Ok(CoefficientMatrix {
        values: a,
        method: Method::SketchLsr,
        diagnostics: SolveDiagnostics {
            iterations: 0,
            final_primal_residual: 0.0,
            objective_value,
            converged: true,
            wall_time_s: start.elapsed().as_secs_f64(),
            unconverged_columns: Vec::new(),
        },
    })
}

/// Unsketched LSR with the data as its own dictionary: `Z = λ(λXᵀX + I)⁻¹XᵀX` (`N × N`).
pub fn solve_batch_lsr(x: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    Ok(solve_sketch_lsr(x, x, lambda)?.values)
}
