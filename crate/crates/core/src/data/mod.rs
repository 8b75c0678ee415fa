//! Union-of-subspaces synthesis, column normalization and matrix files.
//!
//! A point in cluster `k` is `x = C_k y + μ_k + v` where `C_k` is a `D × d_k`
//! orthonormal basis, `y ~ N(0, I_{d_k})` and `v ~ N(0, σ² I_D)`.

mod io;

pub use io::{load_matrix, save_matrix, MatrixFormat};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::seeded_rng;

const ORTHONORMAL_TOL: f64 = 1e-10;

/// Generative model for a union of `K` affine subspaces of `R^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceModel {
    ambient_dim: usize,
    bases: Vec<DMatrix<f64>>,
    centroids: Vec<DVector<f64>>,
    noise_std: f64,
}

impl SubspaceModel {
    /// Builds a model from explicit bases and centroids. Every basis must have
    /// orthonormal columns and every basis/centroid must live in the same `R^D`.
    pub fn new(
        bases: Vec<DMatrix<f64>>,
        centroids: Vec<DVector<f64>>,
        noise_std: f64,
    ) -> Result<Self> {
        if bases.is_empty() {
            return Err(invalid("a subspace model needs at least one subspace"));
        }
        if bases.len() != centroids.len() {
            return Err(mismatch(format!(
                "{} bases but {} centroids",
                bases.len(),
                centroids.len()
            )));
        }
        if !(noise_std >= 0.0 && noise_std.is_finite()) {
            return Err(invalid(format!("noise_std must be finite and ≥ 0, got {noise_std}")));
        }
        let ambient_dim = centroids[0].len();
        if ambient_dim == 0 {
            return Err(invalid("ambient dimension must be ≥ 1"));
        }
        for (k, (basis, mu)) in bases.iter().zip(&centroids).enumerate() {
            if basis.nrows() != ambient_dim || mu.len() != ambient_dim {
                return Err(mismatch(format!(
                    "subspace {k}: basis has {} rows and centroid has {} entries, expected D = {ambient_dim}",
                    basis.nrows(),
                    mu.len()
                )));
            }
            if basis.ncols() > ambient_dim {
                return Err(mismatch(format!(
                    "subspace {k}: dimension {} exceeds D = {ambient_dim}",
                    basis.ncols()
                )));
            }
            let gram = basis.tr_mul(basis);
            let err = (gram - DMatrix::<f64>::identity(basis.ncols(), basis.ncols())).amax();
            if err > ORTHONORMAL_TOL {
                return Err(invalid(format!(
                    "subspace {k}: basis is not orthonormal (max |CᵀC − I| = {err:.3e})"
                )));
            }
        }
        Ok(Self {
            ambient_dim,
            bases,
            centroids,
            noise_std,
        })
    }

    /// Random linear subspaces (zero centroids) of the given dimensions.
    /// Each basis is the Q factor of a seeded Gaussian `D × d_k` matrix.
    pub fn random_linear(ambient_dim: usize, dims: &[usize], noise_std: f64, seed: u64) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(invalid("ambient dimension must be ≥ 1"));
        }
        let mut rng = seeded_rng(seed);
        let mut bases = Vec::with_capacity(dims.len());
        for (k, &d) in dims.iter().enumerate() {
            if d > ambient_dim {
                return Err(mismatch(format!(
                    "subspace {k}: dimension {d} exceeds D = {ambient_dim}"
                )));
            }
            bases.push(random_orthonormal(ambient_dim, d, &mut rng));
        }
        let centroids = vec![DVector::zeros(ambient_dim); dims.len()];
        Self::new(bases, centroids, noise_std)
    }

    pub fn num_subspaces(&self) -> usize {
        self.bases.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.ncols()).collect()
    }

    pub fn bases(&self) -> &[DMatrix<f64>] {
        &self.bases
    }

    pub fn centroids(&self) -> &[DVector<f64>] {
        &self.centroids
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }
}

fn random_orthonormal(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    if cols == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let mut entries = Vec::with_capacity(rows * cols);
    entries.extend((0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let g = DMatrix::from_vec(rows, cols, entries);
    g.qr().q()
}

/// A `D × N` data matrix (one datum per column) with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
    labels: Option<Vec<usize>>,
}

impl DataMatrix {
    pub fn new(values: DMatrix<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(invalid(format!(
                "data matrix must be at least 1×1, got {}×{}",
                values.nrows(),
                values.ncols()
            )));
        }
        for col in 0..values.ncols() {
            for row in 0..values.nrows() {
                if !values[(row, col)].is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != values.ncols() {
                return Err(mismatch(format!(
                    "{} labels for {} columns",
                    labels.len(),
                    values.ncols()
                )));
            }
        }
        Ok(Self { values, labels })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Ambient dimension `D`.
    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    /// Number of data `N`.
    pub fn len(&self) -> usize {
        self.values.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.values.ncols() == 0
    }

    /// Number of distinct ground-truth classes, if labels are known.
    pub fn num_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }
}

/// Draws `counts[k]` points from subspace `k`, in cluster order.
///
/// The random stream is consumed sequentially: for each point, first the
/// `d_k` coordinates, then the `D` noise entries.
pub fn generate_union_of_subspaces(
    model: &SubspaceModel,
    counts: &[usize],
    seed: u64,
) -> Result<DataMatrix> {
    if counts.len() != model.num_subspaces() {
        return Err(mismatch(format!(
            "{} counts for {} subspaces",
            counts.len(),
            model.num_subspaces()
        )));
    }
    if let Some(k) = counts.iter().position(|&c| c == 0) {
        return Err(invalid(format!("subspace {k} has a zero point count")));
    }
    let dim = model.ambient_dim();
    let total: usize = counts.iter().sum();
    let mut rng = seeded_rng(seed);
    let mut values = DMatrix::zeros(dim, total);
    let mut labels = Vec::with_capacity(total);
    let mut col = 0;
    for (k, &count) in counts.iter().enumerate() {
        let basis = &model.bases[k];
        let mu = &model.centroids[k];
        for _ in 0..count {
            let y = DVector::from_iterator(
                basis.ncols(),
                (0..basis.ncols()).map(|_| rng.sample::<f64, _>(StandardNormal)),
            );
            let mut x = basis * y + mu;
            if model.noise_std > 0.0 {
                for v in x.iter_mut() {
                    *v += model.noise_std * rng.sample::<f64, _>(StandardNormal);
                }
            }
            values.set_column(col, &x);
            labels.push(k);
            col += 1;
        }
    }
    DataMatrix::new(values, Some(labels))
}

/// Scales every column to unit Euclidean norm. Labels are carried over.
pub fn normalize_columns(data: &DataMatrix) -> Result<DataMatrix> {
    let mut values = data.values.clone();
    for (index, mut col) in values.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(Error::ZeroColumn { index });
        }
        col /= norm;
    }
    Ok(DataMatrix {
        values,
        labels: data.labels.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::numerical_rank;

    #[test]
    fn empty_basis_collapses_to_centroid() {
        let model = SubspaceModel::new(
            vec![DMatrix::zeros(2, 0)],
            vec![DVector::from_vec(vec![1.0, 0.0])],
            0.0,
        )
        .unwrap();
        let data = generate_union_of_subspaces(&model, &[3], 11).unwrap();
        assert_eq!(data.len(), 3);
        for col in data.values().column_iter() {
            assert_eq!(col[0], 1.0);
            assert_eq!(col[1], 0.0);
        }
    }

    #[test]
    fn noise_free_points_lie_in_their_subspace() {
        let model = SubspaceModel::random_linear(6, &[2], 0.0, 3).unwrap();
        let data = generate_union_of_subspaces(&model, &[25], 4).unwrap();
        let c = &model.bases()[0];
        for x in data.values().column_iter() {
            let resid = x - c * (c.transpose() * x);
            assert!(resid.norm() <= 1e-10);
        }
    }

    #[test]
    fn three_planes_in_r10_have_rank_six() {
        let model = SubspaceModel::random_linear(10, &[2, 2, 2], 0.0, 99).unwrap();
        let data = generate_union_of_subspaces(&model, &[20, 20, 20], 5).unwrap();
        assert_eq!(numerical_rank(data.values(), 1e-10), 6);
        assert_eq!(data.labels().unwrap().iter().filter(|&&l| l == 2).count(), 20);
    }

    #[test]
    fn rank_is_bounded_by_affine_dimensions() {
        let mut rng = seeded_rng(1);
        let bases = vec![random_orthonormal(12, 2, &mut rng), random_orthonormal(12, 3, &mut rng)];
        let centroids = vec![DVector::from_element(12, 0.5), DVector::zeros(12)];
        let model = SubspaceModel::new(bases, centroids, 0.0).unwrap();
        let data = generate_union_of_subspaces(&model, &[30, 30], 2).unwrap();
        assert!(numerical_rank(data.values(), 1e-10) <= (2 + 1) + 3);
    }

    #[test]
    fn generator_is_deterministic() {
        let model = SubspaceModel::random_linear(8, &[3, 2], 0.1, 17).unwrap();
        let a = generate_union_of_subspaces(&model, &[10, 7], 123).unwrap();
        let b = generate_union_of_subspaces(&model, &[10, 7], 123).unwrap();
        assert_eq!(a, b);
        let c = generate_union_of_subspaces(&model, &[10, 7], 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn model_rejects_bad_shapes() {
        let err = SubspaceModel::new(
            vec![DMatrix::identity(3, 2)],
            vec![DVector::zeros(4)],
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
        let skewed = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        assert!(SubspaceModel::new(vec![skewed], vec![DVector::zeros(2)], 0.0).is_err());
        let model = SubspaceModel::random_linear(4, &[1, 1], 0.0, 0).unwrap();
        assert!(generate_union_of_subspaces(&model, &[3], 0).is_err());
        assert!(generate_union_of_subspaces(&model, &[3, 0], 0).is_err());
    }

    #[test]
    fn normalizes_three_four_five() {
        let data = DataMatrix::new(DMatrix::from_column_slice(2, 1, &[3.0, 4.0]), None).unwrap();
        let unit = normalize_columns(&data).unwrap();
        assert!((unit.values()[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((unit.values()[(1, 0)] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn normalization_is_idempotent_and_keeps_labels() {
        let model = SubspaceModel::random_linear(7, &[2, 3], 0.2, 8).unwrap();
        let data = generate_union_of_subspaces(&model, &[15, 15], 9).unwrap();
        let once = normalize_columns(&data).unwrap();
        for col in once.values().column_iter() {
            assert!((col.norm() - 1.0).abs() <= 1e-12);
        }
        let twice = normalize_columns(&once).unwrap();
        assert!((once.values() - twice.values()).amax() <= 1e-12);
        assert_eq!(twice.labels(), data.labels());
    }

    #[test]
    fn zero_column_is_reported_with_index() {
        let m = DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 2.0]);
        let data = DataMatrix::new(m, None).unwrap();
        assert!(matches!(normalize_columns(&data), Err(Error::ZeroColumn { index: 1 })));
    }

    #[test]
    fn data_matrix_rejects_non_finite_and_empty() {
        let m = DMatrix::from_column_slice(2, 1, &[1.0, f64::NAN]);
        assert!(matches!(DataMatrix::new(m, None), Err(Error::NonFinite { row: 1, col: 0 })));
        assert!(DataMatrix::new(DMatrix::zeros(0, 3), None).is_err());
        let m = DMatrix::from_column_slice(1, 2, &[1.0, 2.0]);
        assert!(DataMatrix::new(m, Some(vec![0])).is_err());
    }
}
