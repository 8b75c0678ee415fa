//! Johnson–Lindenstrauss sketch operators.
//!
//! An operator is an `rows × cols` random matrix `R` that is a pure function
//! of `(kind, rows, cols, seed)`. [`apply_right`] forms `XR` (compressing the
//! `N` data columns into an `n`-column dictionary) and [`apply_left`] forms
//! `RᵀX`, i.e. it maps every column of `X` from `R^rows` to `R^cols`
//! (dimensionality reduction of the data vectors).
//!
//! The Hadamard operator is never materialized: it is applied as a signed,
//! zero-padded fast Walsh–Hadamard transform followed by coordinate sampling.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SketchKind {
    /// i.i.d. ±1/√n entries.
    Rademacher,
    /// i.i.d. N(0, 1/n) entries.
    Gaussian,
    /// CountSketch: one ±1 per row at a uniformly random column.
    SparseEmbedding,
    /// Subsampled randomized Hadamard transform.
    HadamardFjlt,
}

impl SketchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rademacher => "rademacher",
            Self::Gaussian => "gaussian",
            Self::SparseEmbedding => "sparse_embedding",
            Self::HadamardFjlt => "hadamard_fjlt",
        }
    }
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "rademacher" | "sign" => Ok(Self::Rademacher),
            "gaussian" | "normal" => Ok(Self::Gaussian),
            "sparse" | "sparse_embedding" | "countsketch" => Ok(Self::SparseEmbedding),
            "fjlt" | "hadamard" | "hadamard_fjlt" | "srht" => Ok(Self::HadamardFjlt),
            other => Err(invalid(format!("unknown sketch kind {other:?}"))),
        }
    }
}

/// Distortion/failure parameters a sketch is meant to satisfy. Recorded for
/// reports only; the output dimension is always chosen by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JltParams {
    pub epsilon: f64,
    pub delta: f64,
}

/// Serializable identity of an operator; enough to rebuild it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SketchDescriptor {
    pub kind: SketchKind,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jlt_params: Option<JltParams>,
}

#[derive(Debug, Clone)]
enum Repr {
    Dense(DMatrix<f64>),
    /// Per input row: (output column, sign).
    Sparse(Vec<(usize, f64)>),
    Hadamard(Hadamard),
}

#[derive(Debug, Clone)]
struct Hadamard {
    padded: usize,
    signs: Vec<f64>,
    sampled: Vec<usize>,
    /// √(padded / cols) / √padded: output rescaling folded with the WHT normalization.
    scale: f64,
}

#[derive(Debug, Clone)]
pub struct SketchOperator {
    desc: SketchDescriptor,
    repr: Repr,
}

pub fn make_rademacher(rows: usize, cols: usize, seed: u64) -> Result<SketchOperator> {
    SketchOperator::new(SketchKind::Rademacher, rows, cols, seed)
}

pub fn make_gaussian(rows: usize, cols: usize, seed: u64) -> Result<SketchOperator> {
    SketchOperator::new(SketchKind::Gaussian, rows, cols, seed)
}

pub fn make_sparse_embedding(rows: usize, cols: usize, seed: u64) -> Result<SketchOperator> {
    SketchOperator::new(SketchKind::SparseEmbedding, rows, cols, seed)
}

pub fn make_fjlt_hadamard(rows: usize, cols: usize, seed: u64) -> Result<SketchOperator> {
    SketchOperator::new(SketchKind::HadamardFjlt, rows, cols, seed)
}

impl SketchOperator {
    pub fn new(kind: SketchKind, rows: usize, cols: usize, seed: u64) -> Result<Self> {
        Self::from_descriptor(SketchDescriptor {
            kind,
            rows,
            cols,
            seed,
            jlt_params: None,
        })
    }

    pub fn from_descriptor(desc: SketchDescriptor) -> Result<Self> {
        let SketchDescriptor { kind, rows, cols, seed, jlt_params } = desc;
        if rows == 0 || cols == 0 {
            return Err(invalid(format!("sketch must be at least 1×1, got {rows}×{cols}")));
        }
        if let Some(p) = jlt_params {
            check_jlt(p)?;
        }
        let mut rng = seeded_rng(seed);
        let repr = match kind {
            SketchKind::Rademacher => {
                let scale = 1.0 / (cols as f64).sqrt();
                let entries = (0..rows * cols)
                    .map(|_| if rng.random::<bool>() { scale } else { -scale })
                    .collect();
                Repr::Dense(DMatrix::from_vec(rows, cols, entries))
            }
            SketchKind::Gaussian => {
                let scale = 1.0 / (cols as f64).sqrt();
                let entries = (0..rows * cols)
                    .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                Repr::Dense(DMatrix::from_vec(rows, cols, entries))
            }
            SketchKind::SparseEmbedding => Repr::Sparse(
                (0..rows)
                    .map(|_| {
                        let col = rng.random_range(0..cols);
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        (col, sign)
                    })
                    .collect(),
            ),
            SketchKind::HadamardFjlt => {
                let padded = rows.max(cols).next_power_of_two();
                let signs = (0..rows)
                    .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                    .collect();
                let sampled = index::sample(&mut rng, padded, cols).into_vec();
                let scale = ((padded as f64) / (cols as f64)).sqrt() / (padded as f64).sqrt();
                Repr::Hadamard(Hadamard { padded, signs, sampled, scale })
            }
        };
        Ok(Self { desc, repr })
    }

    pub fn with_jlt_params(mut self, epsilon: f64, delta: f64) -> Result<Self> {
        let p = JltParams { epsilon, delta };
        check_jlt(p)?;
        self.desc.jlt_params = Some(p);
        Ok(self)
    }

    pub fn descriptor(&self) -> &SketchDescriptor {
        &self.desc
    }

    pub fn kind(&self) -> SketchKind {
        self.desc.kind
    }

    pub fn rows(&self) -> usize {
        self.desc.rows
    }

    pub fn cols(&self) -> usize {
        self.desc.cols
    }

    pub fn seed(&self) -> u64 {
        self.desc.seed
    }

    /// Explicit `rows × cols` matrix. `None` for the Hadamard kind, which is
    /// only ever applied through the fast transform.
    pub fn materialize(&self) -> Option<DMatrix<f64>> {
        match &self.repr {
            Repr::Dense(m) => Some(m.clone()),
            Repr::Sparse(map) => {
                let mut m = DMatrix::zeros(self.rows(), self.cols());
                for (i, &(j, s)) in map.iter().enumerate() {
                    m[(i, j)] = s;
                }
                Some(m)
            }
            Repr::Hadamard(_) => None,
        }
    }

    /// Length of the zero-padded transform (Hadamard kind only).
    pub fn padded_len(&self) -> Option<usize> {
        match &self.repr {
            Repr::Hadamard(h) => Some(h.padded),
            _ => None,
        }
    }

    /// Random diagonal signs, one per input row (Hadamard kind only).
    pub fn hadamard_signs(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Hadamard(h) => Some(&h.signs),
            _ => None,
        }
    }

    /// Transform coordinates kept, in output order (Hadamard kind only).
    pub fn hadamard_samples(&self) -> Option<&[usize]> {
        match &self.repr {
            Repr::Hadamard(h) => Some(&h.sampled),
            _ => None,
        }
    }

    /// `xᵀR` for a single length-`rows` vector.
    pub fn apply_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows() {
            return Err(mismatch(format!(
                "vector of length {} against a sketch with {} rows",
                x.len(),
                self.rows()
            )));
        }
        let mut out = vec![0.0; self.cols()];
        match &self.repr {
            Repr::Dense(m) => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = crate::linalg::dot(m.column(j).as_slice(), x);
                }
            }
            Repr::Sparse(map) => {
                for (&(j, s), &v) in map.iter().zip(x) {
                    out[j] += s * v;
                }
            }
            Repr::Hadamard(h) => {
                let mut buf = vec![0.0; h.padded];
                h.transform_into(x, &mut buf, &mut out);
            }
        }
        Ok(out)
    }
}

fn check_jlt(p: JltParams) -> Result<()> {
    let ok = |v: f64| v > 0.0 && v < 1.0;
    if ok(p.epsilon) && ok(p.delta) {
        Ok(())
    } else {
        Err(invalid(format!(
            "JLT parameters must lie in (0, 1), got ε = {}, δ = {}",
            p.epsilon, p.delta
        )))
    }
}

impl Hadamard {
    /// Writes the sampled, rescaled `H·S·pad(x)` into `out`. `buf` is scratch of length `padded`.
    fn transform_into(&self, x: &[f64], buf: &mut [f64], out: &mut [f64]) {
        buf.fill(0.0);
        for ((b, &v), &s) in buf.iter_mut().zip(x).zip(&self.signs) {
            *b = s * v;
        }
        fwht(buf);
        for (o, &idx) in out.iter_mut().zip(&self.sampled) {
            *o = self.scale * buf[idx];
        }
    }
}

/// In-place unnormalized Walsh–Hadamard transform; `data.len()` must be a power of two.
pub fn fwht(data: &mut [f64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// `B = XR` for a `D × N` matrix `X` and an `N × n` operator.
pub fn apply_right(x: &DMatrix<f64>, op: &SketchOperator) -> Result<DMatrix<f64>> {
    if x.ncols() != op.rows() {
        return Err(mismatch(format!(
            "X has {} columns but the sketch has {} rows",
            x.ncols(),
            op.rows()
        )));
    }
    let (d, n) = (x.nrows(), op.cols());
    Ok(match &op.repr {
        Repr::Dense(r) => x * r,
        Repr::Sparse(map) => {
            let mut b = DMatrix::zeros(d, n);
            for (i, &(j, s)) in map.iter().enumerate() {
                b.column_mut(j).axpy(s, &x.column(i), 1.0);
            }
            b
        }
        Repr::Hadamard(h) => {
            // Each row of X is transformed independently.
            let rows: Vec<Vec<f64>> = (0..d)
                .into_par_iter()
                .map_init(
                    || (vec![0.0; x.ncols()], vec![0.0; h.padded]),
                    |(row, buf), i| {
                        for (dst, src) in row.iter_mut().zip(x.row(i).iter()) {
                            *dst = *src;
                        }
                        let mut out = vec![0.0; n];
                        h.transform_into(row, buf, &mut out);
                        out
                    },
                )
                .collect();
            DMatrix::from_fn(d, n, |i, j| rows[i][j])
        }
    })
}

/// `X̌ = RᵀX`: maps each column of the `D × N` matrix `X` through a `D × d` operator.
pub fn apply_left(op: &SketchOperator, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != op.rows() {
        return Err(mismatch(format!(
            "X has {} rows but the sketch has {} rows",
            x.nrows(),
            op.rows()
        )));
    }
    let (d, n) = (op.cols(), x.ncols());
    Ok(match &op.repr {
        Repr::Dense(r) => r.tr_mul(x),
        Repr::Sparse(map) => {
            let mut out = DMatrix::zeros(d, n);
            for (i, &(j, s)) in map.iter().enumerate() {
                for c in 0..n {
                    out[(j, c)] += s * x[(i, c)];
                }
            }
            out
        }
        Repr::Hadamard(h) => {
            let cols: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map_init(
                    || vec![0.0; h.padded],
                    |buf, j| {
                        let mut out = vec![0.0; d];
                        h.transform_into(x.column(j).as_slice(), buf, &mut out);
                        out
                    },
                )
                .collect();
            DMatrix::from_fn(d, n, |i, j| cols[j][i])
        }
    })
}
