mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use sketchsc::eval::accuracy;
use sketchsc::sketch::{apply_left, apply_right, SketchOperator};
use sketchsc::solvers::{objective, solve, solve_batch_lsr, Method, SolverConfig};
use sketchsc::spectral::{kmeans, KMeansOptions};
use sketchsc::SketchKind;

const KINDS: [SketchKind; 4] = [
    SketchKind::Rademacher,
    SketchKind::Gaussian,
    SketchKind::SparseEmbedding,
    SketchKind::HadamardFjlt,
];

fn explicit(op: &SketchOperator) -> DMatrix<f64> {
    op.materialize().unwrap_or_else(|| {
        let signs = op.hadamard_signs().unwrap();
        let samples = op.hadamard_samples().unwrap();
        let scale = 1.0 / (op.cols() as f64).sqrt();
        DMatrix::from_fn(op.rows(), op.cols(), |i, j| scale * signs[i] * hadamard_entry(i, samples[j]))
    })
}

#[test]
fn fast_products_match_explicit_matrices() {
    let mut g = rng(11);
    for kind in KINDS {
        for (rows, cols) in [(37, 9), (16, 16), (5, 12)] {
            let op = SketchOperator::new(kind, rows, cols, 3).unwrap();
            let r = explicit(&op);
            let x = gaussian(6, rows, &mut g);
            assert!(rel_frobenius(&apply_right(&x, &op).unwrap(), &(&x * &r)) < 1e-12, "{kind} right");
            let y = gaussian(rows, 7, &mut g);
            assert!(rel_frobenius(&apply_left(&op, &y).unwrap(), &(r.transpose() * &y)) < 1e-12, "{kind} left");
            let v: Vec<f64> = x.row(0).iter().copied().collect();
            let xv = DVector::from_vec(op.apply_vector(&v).unwrap());
            assert!((xv - (r.transpose() * DVector::from_vec(v))).norm() < 1e-12);
        }
    }
}

#[test]
fn unsampled_hadamard_is_orthogonal() {
    // Square and unpadded: R = S·H/√P is orthogonal.
    let op = SketchOperator::new(SketchKind::HadamardFjlt, 16, 16, 9).unwrap();
    let r = explicit(&op);
    assert!(((r.transpose() * &r) - DMatrix::identity(16, 16)).norm() < 1e-12);
}

#[test]
fn lsr_matches_normal_equations() {
    let mut g = rng(5);
    for trial in 0..20 {
        let (d, n_cols, n) = (g.random_range(3..30), g.random_range(5..30), g.random_range(2..20));
        let x = gaussian(d, n_cols, &mut g);
        let b = gaussian(d, n, &mut g);
        let lambda = 10f64.powf(g.random_range(-2.0..3.0));
        let got = solve(Method::SketchLsr, &x, &b, &SolverConfig::ssc(lambda)).unwrap();
        let want = lsr_normal_equations(&x, &b, lambda);
        assert!(rel_frobenius(&got.values, &want) < 1e-10, "trial {trial}");
    }
}

#[test]
fn batch_lsr_matches_normal_equations() {
    let mut g = rng(6);
    let x = gaussian(8, 12, &mut g);
    let got = solve_batch_lsr(&x, 7.0).unwrap();
    assert!(rel_frobenius(&got, &lsr_normal_equations(&x, &x, 7.0)) < 1e-10);
}

#[test]
fn ssc_matches_lasso_oracle() {
    let mut g = rng(7);
    for _ in 0..5 {
        let x = gaussian(20, 12, &mut g);
        let b = gaussian(20, 8, &mut g);
        let lambda = 5.0;
        let cfg = SolverConfig::ssc(lambda).with_tol(1e-12).with_max_iter(100_000);
        let got = solve(Method::SketchSsc, &x, &b, &cfg).unwrap();
        assert!(got.diagnostics.converged);
        for j in 0..x.ncols() {
            let xj: DVector<f64> = x.column(j).into();
            let oracle = fista_lasso(&b, &xj, lambda, 20_000);
            let want = lasso_objective(&b, &xj, &oracle, lambda);
            let have = lasso_objective(&b, &xj, &got.values.column(j).into(), lambda);
            assert!((have - want).abs() <= 1e-6 * want, "column {j}: {have} vs {want}");
        }
    }
}

#[test]
fn lrr_matches_nuclear_oracle() {
    let mut g = rng(8);
    for _ in 0..3 {
        let x = gaussian(15, 20, &mut g);
        let b = gaussian(15, 6, &mut g);
        let lambda = 2.0;
        let cfg = SolverConfig::lrr(lambda).with_tol(1e-10).with_max_iter(5000);
        let got = solve(Method::SketchLrr, &x, &b, &cfg).unwrap();
        let oracle = prox_grad_nuclear(&b, &x, lambda, 5000);
        let want = nuclear_objective(&b, &x, &oracle, lambda);
        let have = objective(Method::SketchLrr, &x, &b, &got.values, lambda);
        assert!((have - want).abs() <= 1e-4 * want, "{have} vs {want}");
    }
}

#[test]
fn accuracy_matches_brute_force() {
    let mut g = rng(9);
    for _ in 0..200 {
        let k = g.random_range(1..=6);
        let n = g.random_range(1..40);
        let truth: Vec<usize> = (0..n).map(|_| g.random_range(0..k)).collect();
        let pred: Vec<usize> = (0..n).map(|_| g.random_range(0..k)).collect();
        assert_eq!(accuracy(&pred, &truth).unwrap(), brute_force_accuracy(&pred, &truth));
    }
}

#[test]
fn kmeans_two_clouds_matches_best_bipartition() {
    // Brute force over all 2-partitions of 8 points.
    let pts = [
        [0.0, 0.0],
        [0.2, 0.1],
        [0.1, -0.1],
        [-0.1, 0.2],
        [10.0, 10.0],
        [10.2, 9.9],
        [9.8, 10.1],
        [10.1, 10.3],
    ];
    let p = DMatrix::from_fn(8, 2, |i, j| pts[i][j]);
    let scatter = |idx: &[usize]| {
        let m = idx.len() as f64;
        let c: Vec<f64> = (0..2).map(|d| idx.iter().map(|&i| pts[i][d]).sum::<f64>() / m).collect();
        idx.iter().map(|&i| (0..2).map(|d| (pts[i][d] - c[d]).powi(2)).sum::<f64>()).sum::<f64>()
    };
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << 8) - 1 {
        let a: Vec<usize> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
        let b: Vec<usize> = (0..8).filter(|i| mask >> i & 1 == 0).collect();
        best = best.min(scatter(&a) + scatter(&b));
    }
    let got = kmeans(&p, 2, 1, &KMeansOptions::default()).unwrap();
    assert!((got.inertia - best).abs() < 1e-12);
}

#[test]
fn theorem1_rhs_matches_independent_evaluation() {
    use sketchsc::eval::{bound_params, corollary2_rhs, theorem1_rhs};
    let mut g = rng(12);
    let x = gaussian(12, 5, &mut g) * gaussian(5, 40, &mut g);
    let sigma3 = {
        let mut s: Vec<f64> = x.clone().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s[2]
    };
    let (lambda, eps, r) = (0.7, 0.3, 2);
    let p = bound_params(&x, r, 8, lambda, eps).unwrap();
    assert_eq!(p.rho, 5);
    let want = lambda * (1.0 + ((1.0 + eps) / (1.0 - eps)).sqrt() * 3f64.sqrt() * sigma3 * sigma3) + 1.0 / (1.0 - eps).sqrt();
    assert!((theorem1_rhs(&p) - want).abs() <= 1e-12 * want);
    let want2 = lambda * (40f64.sqrt() + ((1.0 + eps) / (1.0 - eps)).sqrt() * 3f64.sqrt() * sigma3 * sigma3)
        + (8.0 / (1.0 - eps)).sqrt();
    assert!((corollary2_rhs(&p, 40) - want2).abs() <= 1e-12 * want2);
}
