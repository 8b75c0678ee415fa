//! Compressed-sparse-row storage for symmetric matrices (both triangles stored).

use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCsr {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymmetricCsr {
    /// Builds from upper-triangle triplets `(i, j, v)` with `i ≤ j`; each
    /// off-diagonal entry is mirrored. Duplicates are summed.
    pub fn from_upper_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for &(i, j, v) in triplets {
            debug_assert!(i <= j && j < dim);
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut last = None;
            for (j, v) in row {
                if last == Some(j) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { dim, row_ptr, col_idx, values }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_upper_triplets(dim, &[])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored entries, counting both triangles.
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// `(column, value)` pairs of row `i`, columns ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// Upper-triangle entries `(i, j, v)` with `i ≤ j`, row-major.
    pub fn upper_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (i, j, v)))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub(crate) fn to_sprs(&self, shift: f64) -> sprs::CsMat<f64> {
        let mut tri = sprs::TriMat::new((self.dim, self.dim));
        for i in 0..self.dim {
            let mut has_diag = false;
            for (j, v) in self.row(i) {
                if i == j {
                    tri.add_triplet(i, j, v + shift);
                    has_diag = true;
                } else {
                    tri.add_triplet(i, j, v);
                }
            }
            if !has_diag {
                tri.add_triplet(i, i, shift);
            }
        }
        tri.to_csr()
    }
}
