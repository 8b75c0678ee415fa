use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::prox::soft_threshold;
use super::{check_dims, check_finite, objective, regularized_gram, CoefficientMatrix, Method, SolveDiagnostics, SolverConfig};
use crate::error::Result;

struct ColumnResult {
    c: DVector<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

/// Column-wise ADMM for `min ‖A‖₁ + (λ/2)‖X − BA‖²_F`.
///
/// Per column `x` with splitting `a = c` and scaled dual `δ`:
///
/// ```text
///     a ← (λBᵀB + νI)⁻¹ (λBᵀx + ν(c − δ))
///     c ← T_{1/ν}(a + δ)
///     δ ← δ + a − c
/// ```
///
/// `ν` stays at `cfg.nu0` so one factorization serves every column and
/// iteration. A column stops once both the primal residual `‖a − c‖` and
/// the dual residual `ν‖c − c_prev‖` are at most `tol · max(1, ‖a‖)`. Columns run in parallel; each column's result depends only on
/// that column. The returned coefficients are the sparse `c` iterates.
pub fn solve_sketch_ssc(x: &DMatrix<f64>, b: &DMatrix<f64>, cfg: &SolverConfig) -> Result<CoefficientMatrix> {
    check_dims(x, b)?;
    cfg.validate()?;
    let start = Instant::now();
    let nu = cfg.nu0;
    let chol = regularized_gram(b, cfg.lambda, nu)?;
    let btx = b.tr_mul(x) * cfg.lambda;
    let n = b.ncols();
    let thresh = 1.0 / nu;

    let columns: Vec<ColumnResult> = (0..x.ncols())
        .into_par_iter()
        .map(|j| {
            let rhs0 = btx.column(j);
            let mut c = DVector::zeros(n);
            let mut delta = DVector::zeros(n);
            let mut a = DVector::zeros(n);
            let mut residual = f64::INFINITY;
            for it in 1..=cfg.max_iter {
                a.copy_from(&rhs0);
                a.axpy(nu, &(&c - &delta), 1.0);
                chol.solve_mut(&mut a);
                let mut moved = 0.0;
                for i in 0..n {
                    let next = soft_threshold(a[i] + delta[i], thresh);
                    moved += (next - c[i]) * (next - c[i]);
                    c[i] = next;
                }
                let gap = &a - &c;
                delta += &gap;
                let scale = a.norm().max(1.0);
                residual = gap.norm() / scale;
                if residual <= cfg.tol && nu * moved.sqrt() / scale <= cfg.tol {
                    return ColumnResult { c, iterations: it, residual, converged: true };
                }
            }
            ColumnResult { c, iterations: cfg.max_iter, residual, converged: false }
        })
        .collect();

    let mut values = DMatrix::zeros(n, x.ncols());
    let mut iterations = 0;
    let mut worst = 0.0f64;
    let mut unconverged_columns = Vec::new();
    for (j, col) in columns.into_iter().enumerate() {
        values.set_column(j, &col.c);
        iterations = iterations.max(col.iterations);
        worst = worst.max(col.residual);
        if !col.converged {
            unconverged_columns.push(j);
        }
    }
    check_finite(&values, "Sketch-SSC")?;
    let objective_value = objective(Method::SketchSsc, x, b, &values, cfg.lambda);
    Ok(CoefficientMatrix {
        values,
        method: Method::SketchSsc,
        diagnostics: SolveDiagnostics {
            iterations,
            final_primal_residual: worst,
            objective_value,
            converged: unconverged_columns.is_empty(),
            wall_time_s: start.elapsed().as_secs_f64(),
            unconverged_columns,
        },
    })
}
