use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `T_σ(z)`: shrink toward zero by `σ`, mapping `[-σ, σ]` to 0.
#[inline]
pub fn soft_threshold(z: f64, sigma: f64) -> f64 {
    if z > sigma {
        z - sigma
    } else if z < -sigma {
        z + sigma
    } else {
        0.0
    }
}

pub fn soft_threshold_matrix(m: &DMatrix<f64>, sigma: f64) -> DMatrix<f64> {
    m.map(|z| soft_threshold(z, sigma))
}

/// Singular value thresholding: `U·T_τ(Σ)·Vᵀ`, the minimizer of
/// `τ‖C‖_* + ½‖C − M‖²_F`.
pub fn svt(m: &DMatrix<f64>, tau: f64) -> Result<DMatrix<f64>> {
    if m.is_empty() {
        return Ok(m.clone());
    }
    let svd = nalgebra::SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let shrunk = s - tau;
        if shrunk > 0.0 {
            out.ger(shrunk, &u.column(i), &v_t.row(i).transpose(), 1.0);
        }
    }
    Ok(out)
}
