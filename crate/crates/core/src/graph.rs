//! Mutual k-nearest-neighbour affinity graphs over the columns of `A`.
//!
//! `W_ij ≠ 0` iff `j ∈ K_i` or `i ∈ K_j`, where `K_i` holds the `k` columns
//! closest to column `i` in Euclidean distance. Edge weights are either 1 or
//! the heat kernel `exp(−‖a_i − a_j‖²/σ²)`.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::dot;
use crate::sparse::SymmetricCsr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AffinityKind {
    Binary,
    HeatKernel { sigma: f64 },
}

/// Heat-kernel bandwidth: fixed, or the median k-NN distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    Fixed(f64),
    Auto,
}

#[derive(Debug, Clone)]
pub struct AffinityGraph {
    pub weights: SymmetricCsr,
    pub k: usize,
    pub kind: AffinityKind,
}

/// Neighbour index with squared distance.
type Neighbor = (usize, f64);

/// Exact k-NN of every column, nearest first; ties go to the smaller index.
pub fn knn_sets(a: &DMatrix<f64>, k: usize) -> Result<Vec<Vec<usize>>> {
    Ok(knn_with_distances(a, k)?
        .into_iter()
        .map(|nbrs| nbrs.into_iter().map(|(j, _)| j).collect())
        .collect())
}

fn knn_with_distances(a: &DMatrix<f64>, k: usize) -> Result<Vec<Vec<Neighbor>>> {
    let n = a.ncols();
    if k == 0 {
        return Err(invalid("k must be ≥ 1"));
    }
    if k >= n {
        return Err(invalid(format!("k = {k} needs at least k + 1 = {} columns, got {n}", k + 1)));
    }
    let m = a.nrows();
    let cols: Vec<&[f64]> = a.as_slice().chunks(m.max(1)).take(n).collect();
    // Squared norms use the same dot kernel as cross terms so that identical
    // columns come out at distance exactly 0.
    let sq: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut cand: Vec<Neighbor> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, (sq[i] + sq[j] - 2.0 * dot(cols[i], cols[j])).max(0.0)))
                .collect();
            let order = |x: &Neighbor, y: &Neighbor| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0));
            cand.select_nth_unstable_by(k - 1, order);
            cand.truncate(k);
            cand.sort_by(order);
            cand
        })
        .collect())
}

/// Undirected edge set `{i < j : j ∈ K_i or i ∈ K_j}` with one squared
/// distance per edge (taken from the lower endpoint's list when present).
fn mutual_edges(nbrs: &[Vec<Neighbor>]) -> BTreeMap<(usize, usize), f64> {
    let mut edges = BTreeMap::new();
    for (i, list) in nbrs.iter().enumerate() {
        for &(j, d2) in list {
            let key = (i.min(j), i.max(j));
            if i < j {
                edges.insert(key, d2);
            } else {
                edges.entry(key).or_insert(d2);
            }
        }
    }
    edges
}

pub fn build_affinity_binary(a: &DMatrix<f64>, k: usize) -> Result<AffinityGraph> {
    let nbrs = knn_with_distances(a, k)?;
    let triplets: Vec<_> = mutual_edges(&nbrs).into_keys().map(|(i, j)| (i, j, 1.0)).collect();
    Ok(AffinityGraph {
        weights: SymmetricCsr::from_upper_triplets(a.ncols(), &triplets),
        k,
        kind: AffinityKind::Binary,
    })
}

pub fn build_affinity_heat(a: &DMatrix<f64>, k: usize, bandwidth: Bandwidth) -> Result<AffinityGraph> {
    let nbrs = knn_with_distances(a, k)?;
    let sigma = match bandwidth {
        Bandwidth::Fixed(s) if s > 0.0 => s,
        Bandwidth::Fixed(s) => return Err(invalid(format!("sigma must be positive, got {s}"))),
        Bandwidth::Auto => auto_sigma(&nbrs),
    };
    let s2 = sigma * sigma;
    let triplets: Vec<_> = mutual_edges(&nbrs)
        .into_iter()
        .map(|((i, j), d2)| (i, j, if s2.is_infinite() { 1.0 } else { (-d2 / s2).exp() }))
        .collect();
    Ok(AffinityGraph {
        weights: SymmetricCsr::from_upper_triplets(a.ncols(), &triplets),
        k,
        kind: AffinityKind::HeatKernel { sigma },
    })
}

/// Median of all k-NN distances; falls back to the mean positive distance,
/// then to 1, when the median is zero.
fn auto_sigma(nbrs: &[Vec<Neighbor>]) -> f64 {
    let mut d: Vec<f64> = nbrs.iter().flatten().map(|&(_, d2)| d2.sqrt()).collect();
    d.sort_by(f64::total_cmp);
    let m = d.len();
    let median = if m % 2 == 1 { d[m / 2] } else { 0.5 * (d[m / 2 - 1] + d[m / 2]) };
    if median > 0.0 {
        return median;
    }
    let pos: Vec<f64> = d.into_iter().filter(|&v| v > 0.0).collect();
    if pos.is_empty() {
        1.0
    } else {
        pos.iter().sum::<f64>() / pos.len() as f64
    }
}

impl AffinityGraph {
    pub fn num_nodes(&self) -> usize {
        self.weights.dim()
    }

    pub fn num_edges(&self) -> usize {
        self.weights.nnz() / 2
    }

    /// MatrixMarket `coordinate real symmetric` (lower triangle, 1-based).
    pub fn write_matrix_market(&self, out: &mut impl Write) -> Result<()> {
        let n = self.num_nodes();
        writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(out, "{n} {n} {}", self.num_edges())?;
        for (i, j, w) in self.weights.upper_triplets() {
            writeln!(out, "{} {} {w}", j + 1, i + 1)?;
        }
        Ok(())
    }

    /// Edge list `i,j,w` with `i < j`, header included.
    pub fn write_edge_list_csv(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "i,j,w")?;
        for (i, j, w) in self.weights.upper_triplets() {
            writeln!(out, "{i},{j},{w}")?;
        }
        Ok(())
    }
}
