use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpectralEmbedding;
use crate::error::{invalid, Error, Result};
use crate::linalg::seeded_rng;
use crate::sparse::SymmetricCsr;

/// Largest graph on which a non-converged iterative solve falls back to
/// the dense solver.
pub const DENSE_FALLBACK_MAX: usize = 4000;

/// Eigensolver selection: dense symmetric QR up to `dense_cutoff` nodes,
/// block shift-invert subspace iteration above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    pub dense_cutoff: usize,
    /// Relative residual `‖Lv − θv‖ / ‖L‖` accepted by the iterative solver.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_cutoff: 256,
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

/// The `k` eigenpairs of symmetric `l` with smallest eigenvalues, ascending.
pub fn trailing_eigenvectors(l: &SymmetricCsr, k: usize, opts: &EigenOptions) -> Result<SpectralEmbedding> {
    let n = l.dim();
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 ≤ K ≤ N, got K = {k}, N = {n}")));
    }
    if n <= opts.dense_cutoff {
        Ok(dense_trailing(&l.to_dense(), k))
    } else {
        match shift_invert_trailing(l, k, opts) {
            Err(Error::Numerical(_)) if n <= DENSE_FALLBACK_MAX => Ok(dense_trailing(&l.to_dense(), k)),
            other => other,
        }
    }
}

fn dense_trailing(l: &DMatrix<f64>, k: usize) -> SpectralEmbedding {
    let eig = SymmetricEigen::new(l.clone());
    let mut order: Vec<usize> = (0..l.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    order.truncate(k);
    let vectors = DMatrix::from_fn(l.nrows(), k, |i, j| eig.eigenvectors[(i, order[j])]);
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    SpectralEmbedding { vectors, eigenvalues }
}

/// Simultaneous iteration on `(L + σI)⁻¹` with Rayleigh–Ritz on `L`.
///
/// A block of `p > k` vectors resolves eigenvalue multiplicities (disconnected
/// components) that a single-vector Krylov method would miss.
fn shift_invert_trailing(l: &SymmetricCsr, k: usize, opts: &EigenOptions) -> Result<SpectralEmbedding> {
    let n = l.dim();
    let max_diag = (0..n).map(|i| l.get(i, i)).fold(0.0f64, f64::max);
    let scale = if max_diag > 0.0 { max_diag } else { 1.0 };
    let shift = 1e-6 * scale;
    // Gershgorin: ‖L‖₂ ≤ 2·max degree.
    let norm_est = 2.0 * scale;

    let shifted = l.to_sprs(shift);
    let ldl = sprs_ldl::Ldl::new()
        .fill_in_reduction(sprs::FillInReduction::ReverseCuthillMcKee)
        .check_symmetry(sprs::SymmetryCheck::DontCheckSymmetry)
        .numeric(shifted.view())
        .map_err(|e| Error::Numerical(format!("sparse LDLᵀ factorization failed: {e}")))?;

    let p = n.min(k + k.max(8));
    let mut rng = seeded_rng(0x5eed_e16e);
    let start: Vec<f64> = (0..n * p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let mut v = DMatrix::from_vec(n, p, start).qr().q();

    for _ in 0..opts.max_iter {
        let solved: Vec<Vec<f64>> = (0..p)
            .into_par_iter()
            .map(|j| ldl.solve(v.column(j).as_slice()))
            .collect();
        let y = DMatrix::from_fn(n, p, |i, j| solved[j][i]);
        let q = y.qr().q();
        let lq = apply_columns(l, &q);
        let mut h = q.tr_mul(&lq);
        h = (&h + h.transpose()) * 0.5;
        let ritz = dense_trailing(&h, p);
        v = &q * &ritz.vectors;
        let lv = &lq * &ritz.vectors;

        let worst = (0..k)
            .map(|j| (lv.column(j) - v.column(j) * ritz.eigenvalues[j]).norm())
            .fold(0.0f64, f64::max);
        if worst <= opts.tol * norm_est {
            return Ok(SpectralEmbedding {
                vectors: v.columns(0, k).into_owned(),
                eigenvalues: ritz.eigenvalues[..k].to_vec(),
            });
        }
    }
    Err(Error::Numerical(format!(
        "shift-invert eigensolver did not converge in {} iterations",
        opts.max_iter
    )))
}

fn apply_columns(l: &SymmetricCsr, m: &DMatrix<f64>) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = (0..m.ncols())
        .into_par_iter()
        .map(|j| l.mul_vec(m.column(j).as_slice()))
        .collect();
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| cols[j][i])
}
