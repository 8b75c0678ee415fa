use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ClusterAssignment;
use crate::error::{invalid, Result};
use crate::linalg::{derive_seed, seeded_rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: 300,
        }
    }
}

/// One k-means++ seeded Lloyd run.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansRun {
    pub labels: Vec<usize>,
    pub inertia: f64,
    /// Inertia after every assignment step, first entry from the seeding.
    pub inertia_trace: Vec<f64>,
}

/// Best of `opts.restarts` runs on the rows of `points`. Restarts run in
/// parallel with seeds derived from `seed`; ties go to the lower restart.
pub fn kmeans(points: &DMatrix<f64>, k: usize, seed: u64, opts: &KMeansOptions) -> Result<ClusterAssignment> {
    check(points, k)?;
    let restarts = opts.restarts.max(1);
    let runs: Vec<KMeansRun> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| kmeans_single(points, k, derive_seed(seed, r), opts.max_iter))
        .collect::<Result<_>>()?;
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
        .expect("at least one restart");
    Ok(ClusterAssignment {
        labels: best.labels,
        k,
        inertia: best.inertia,
    })
}

pub fn kmeans_single(points: &DMatrix<f64>, k: usize, seed: u64, max_iter: usize) -> Result<KMeansRun> {
    check(points, k)?;
    let rows: Vec<Vec<f64>> = points.row_iter().map(|r| r.iter().copied().collect()).collect();
    let mut centers = plus_plus(&rows, k, seed);
    let (mut labels, mut dists) = assign(&rows, &centers);
    let mut inertia: f64 = dists.iter().sum();
    let mut trace = vec![inertia];

    for _ in 0..max_iter {
        centers = update(&rows, &labels, &dists, k, &centers);
        let (new_labels, new_dists) = assign(&rows, &centers);
        let new_inertia: f64 = new_dists.iter().sum();
        debug_assert!(
            new_inertia <= inertia + 1e-9 * inertia.max(1.0),
            "inertia rose from {inertia} to {new_inertia}"
        );
        trace.push(new_inertia);
        let changed = new_labels != labels;
        labels = new_labels;
        dists = new_dists;
        inertia = new_inertia;
        if !changed {
            break;
        }
    }
    Ok(KMeansRun {
        labels,
        inertia,
        inertia_trace: trace,
    })
}

fn check(points: &DMatrix<f64>, k: usize) -> Result<()> {
    if k == 0 || k > points.nrows() {
        return Err(invalid(format!("need 1 ≤ K ≤ N, got K = {k}, N = {}", points.nrows())));
    }
    Ok(())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus(rows: &[Vec<f64>], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded_rng(seed);
    let n = rows.len();
    let mut centers = vec![rows[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d <= 0.0 {
                    continue;
                }
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
                chosen = i;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = rows[pick].clone();
        for (d, r) in d2.iter_mut().zip(rows) {
            *d = d.min(sq_dist(r, &c));
        }
        centers.push(c);
    }
    centers
}

/// Nearest center per row, ties to the lower center index.
fn assign(rows: &[Vec<f64>], centers: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    rows.iter()
        .map(|r| {
            let mut best = (0, f64::INFINITY);
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(r, center);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

/// Centroid update. An empty cluster takes the point farthest from its
/// current center, and that point is withheld from its old cluster's mean.
fn update(rows: &[Vec<f64>], labels: &[usize], dists: &[f64], k: usize, old: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = rows[0].len();
    let mut labels = labels.to_vec();
    let mut counts = vec![0usize; k];
    for &l in &labels {
        counts[l] += 1;
    }
    let mut taken = vec![false; rows.len()];
    let mut relocated: Vec<Option<usize>> = vec![None; k];
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let far = (0..rows.len())
            .filter(|&i| !taken[i] && counts[labels[i]] > 1)
            .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
        if let Some(i) = far {
            counts[labels[i]] -= 1;
            labels[i] = c;
            counts[c] = 1;
            taken[i] = true;
            relocated[c] = Some(i);
        }
    }
    let mut sums = vec![vec![0.0; dim]; k];
    for (r, &l) in rows.iter().zip(&labels) {
        for (s, x) in sums[l].iter_mut().zip(r) {
            *s += x;
        }
    }
    (0..k)
        .map(|c| match (counts[c], relocated[c]) {
            (_, Some(i)) => rows[i].clone(),
            (0, None) => old[c].clone(),
            (m, None) => sums[c].iter().map(|s| s / m as f64).collect(),
        })
        .collect()
}
