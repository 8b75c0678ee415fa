//! Reference implementations used as oracles. They share no code with the
//! library beyond nalgebra's dense kernels.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// `A = (BᵀB + I/λ)⁻¹ BᵀX` by LU, the normal equations of
/// `min ½‖A‖²_F + (λ/2)‖X − BA‖²_F`.
pub fn lsr_normal_equations(x: &DMatrix<f64>, b: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let n = b.ncols();
    let lhs = b.transpose() * b + DMatrix::identity(n, n) / lambda;
    lhs.lu().solve(&(b.transpose() * x)).expect("nonsingular")
}

/// Spectral norm squared of `b` via the eigenvalues of `BᵀB`.
fn lipschitz(b: &DMatrix<f64>) -> f64 {
    (b.transpose() * b).symmetric_eigenvalues().max()
}

fn soft(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

pub fn lasso_objective(b: &DMatrix<f64>, x: &DVector<f64>, a: &DVector<f64>, lambda: f64) -> f64 {
    a.lp_norm(1) + 0.5 * lambda * (x - b * a).norm_squared()
}

/// FISTA with gradient restart on `min ‖a‖₁ + (λ/2)‖x − Ba‖²`.
pub fn fista_lasso(b: &DMatrix<f64>, x: &DVector<f64>, lambda: f64, iters: usize) -> DVector<f64> {
    let step = 1.0 / (lambda * lipschitz(b));
    let mut a = DVector::zeros(b.ncols());
    let mut y = a.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let grad = b.transpose() * (b * &y - x) * lambda;
        let next = (&y - grad * step).map(|v| soft(v, step));
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if (&y - &next).dot(&(&next - &a)) > 0.0 {
            // Momentum points uphill: restart.
            y = next.clone();
            t = 1.0;
        } else {
            y = &next + (&next - &a) * ((t - 1.0) / t_next);
            t = t_next;
        }
        a = next;
    }
    a
}

pub fn nuclear_objective(b: &DMatrix<f64>, x: &DMatrix<f64>, a: &DMatrix<f64>, lambda: f64) -> f64 {
    a.clone().svd(false, false).singular_values.sum() + 0.5 * lambda * (x - b * a).norm_squared()
}

fn svt_oracle(m: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let s = svd.singular_values.map(|v| (v - tau).max(0.0));
    svd.u.unwrap() * DMatrix::from_diagonal(&s) * svd.v_t.unwrap()
}

/// Accelerated proximal gradient with restart on
/// `min ‖A‖_* + (λ/2)‖X − BA‖²_F`.
pub fn prox_grad_nuclear(b: &DMatrix<f64>, x: &DMatrix<f64>, lambda: f64, iters: usize) -> DMatrix<f64> {
    let step = 1.0 / (lambda * lipschitz(b));
    let mut a = DMatrix::zeros(b.ncols(), x.ncols());
    let mut y = a.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let grad = b.transpose() * (b * &y - x) * lambda;
        let next = svt_oracle(&(&y - grad * step), step);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if (&y - &next).dot(&(&next - &a)) > 0.0 {
            y = next.clone();
            t = 1.0;
        } else {
            y = &next + (&next - &a) * ((t - 1.0) / t_next);
            t = t_next;
        }
        a = next;
    }
    a
}

/// Every permutation of `0..m` (Heap's algorithm).
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            p.swap(j, k - 1);
        }
    }
    let mut out = Vec::new();
    heap(m, &mut (0..m).collect(), &mut out);
    out
}

/// Max over relabelings `pred → perm[pred]` of the match fraction.
pub fn brute_force_accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    let m = 1 + pred.iter().chain(truth).copied().max().unwrap_or(0);
    permutations(m)
        .iter()
        .map(|perm| pred.iter().zip(truth).filter(|&(&p, &t)| perm[p] == t).count())
        .max()
        .unwrap() as f64
        / pred.len() as f64
}

/// `H[i][j] = (−1)^{popcount(i & j)}`, unnormalized Sylvester-Hadamard.
pub fn hadamard_entry(i: usize, j: usize) -> f64 {
    if (i & j).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, i: usize) -> usize {
        let p = self.parent[i];
        if p == i {
            return i;
        }
        let root = self.find(p);
        self.parent[i] = root;
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    pub fn components(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        let mut ids = std::collections::BTreeMap::new();
        roots
            .iter()
            .map(|r| {
                let next = ids.len();
                *ids.entry(*r).or_insert(next)
            })
            .collect()
    }
}
