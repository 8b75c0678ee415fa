use nalgebra::DMatrix;
use proptest::prelude::*;
use sketchsc::eval::{accuracy, check_range_preservation};
use sketchsc::graph::build_affinity_binary;
use sketchsc::pipeline::{AffinitySpec, InputSpec, PipelineConfig, SynthSpec};
use sketchsc::sketch::{apply_right, SketchOperator};
use sketchsc::solvers::{objective, soft_threshold, solve, svt, Method, SolverConfig};
use sketchsc::spectral::{kmeans_single, laplacian};
use sketchsc::SketchKind;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-3.0f64..3.0, rows * cols).prop_map(move |v| DMatrix::from_vec(rows, cols, v))
}

fn sized_matrix() -> impl Strategy<Value = DMatrix<f64>> {
    (1usize..8, 1usize..8).prop_flat_map(|(r, c)| matrix(r, c))
}

fn sketch_kind() -> impl Strategy<Value = SketchKind> {
    prop_oneof![
        Just(SketchKind::Rademacher),
        Just(SketchKind::Gaussian),
        Just(SketchKind::SparseEmbedding),
        Just(SketchKind::HadamardFjlt),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn accuracy_ignores_label_names(
        truth in prop::collection::vec(0usize..5, 1..60),
        perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(),
        seed in any::<u64>(),
    ) {
        let pred: Vec<usize> = truth.iter().enumerate()
            .map(|(i, &t)| if (seed >> (i % 64)) & 1 == 1 { (t + 1) % 5 } else { t })
            .collect();
        let renamed: Vec<usize> = pred.iter().map(|&p| perm[p]).collect();
        let a = accuracy(&pred, &truth).unwrap();
        prop_assert_eq!(a, accuracy(&renamed, &truth).unwrap());
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(accuracy(&renamed, &pred).unwrap(), 1.0);
    }

    #[test]
    fn soft_threshold_shrinks(z in -10.0f64..10.0, w in -10.0f64..10.0, s in 0.0f64..5.0) {
        let t = soft_threshold(z, s);
        prop_assert!(t.abs() <= z.abs());
        prop_assert!(t == 0.0 || t.signum() == z.signum());
        prop_assert!((t - soft_threshold(w, s)).abs() <= (z - w).abs() + 1e-15);
    }

    #[test]
    fn svt_is_nonexpansive(m in matrix(4, 6), e in matrix(4, 6), tau in 0.0f64..3.0) {
        let a = svt(&m, tau).unwrap();
        let b = svt(&(&m + &e), tau).unwrap();
        prop_assert!((&a - &b).norm() <= e.norm() + 1e-10);
    }

    #[test]
    fn sketch_is_a_function_of_its_seed(kind in sketch_kind(), rows in 1usize..40, cols in 1usize..20, seed in any::<u64>()) {
        let x = DMatrix::from_fn(3, rows, |i, j| (i as f64 + 1.0) * (j as f64).sin());
        let a = apply_right(&x, &SketchOperator::new(kind, rows, cols, seed).unwrap()).unwrap();
        let b = apply_right(&x, &SketchOperator::new(kind, rows, cols, seed).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn range_preserved_by_identity_sketch(x in sized_matrix()) {
        prop_assert!(check_range_preservation(&x, &(&x * DMatrix::identity(x.ncols(), x.ncols())), 1e-8));
    }

    #[test]
    fn lsr_first_order_condition(x in matrix(6, 9), b in matrix(6, 4), lambda in 0.01f64..100.0) {
        let a = solve(Method::SketchLsr, &x, &b, &SolverConfig::ssc(lambda)).unwrap().values;
        let grad = b.transpose() * (&b * &a - &x) * lambda + &a;
        prop_assert!(grad.norm() <= 1e-8 * a.norm().max(1.0));
    }

    #[test]
    fn solvers_beat_the_zero_matrix(x in matrix(5, 7), b in matrix(5, 4), lambda in 0.1f64..50.0) {
        let zero = DMatrix::zeros(4, 7);
        for method in [Method::SketchLsr, Method::SketchSsc, Method::SketchLrr] {
            let a = solve(method, &x, &b, &SolverConfig::for_method(method, lambda).with_max_iter(2000)).unwrap().values;
            prop_assert!(objective(method, &x, &b, &a, lambda) <= objective(method, &x, &b, &zero, lambda) + 1e-6);
        }
    }

    #[test]
    fn affinity_graph_shape(a in matrix(3, 15), k in 1usize..6) {
        let g = build_affinity_binary(&a, k).unwrap();
        let w = &g.weights;
        for i in 0..15 {
            prop_assert!(w.row_nnz(i) >= k);
            prop_assert_eq!(w.get(i, i), 0.0);
            for (j, v) in w.row(i) {
                prop_assert_eq!(v, 1.0);
                prop_assert_eq!(w.get(j, i), v);
            }
        }
        // Edge sets grow with k.
        let bigger = build_affinity_binary(&a, k + 1).unwrap();
        for (i, j, _) in w.upper_triplets() {
            prop_assert_eq!(bigger.weights.get(i, j), 1.0);
        }
        // The Laplacian annihilates constants and is positive semidefinite.
        let l = laplacian(w);
        prop_assert!(l.mul_vec(&[1.0; 15]).iter().all(|v| v.abs() < 1e-12));
        let eig = l.to_dense().symmetric_eigenvalues();
        prop_assert!(eig.min() > -1e-10);
    }

    #[test]
    fn kmeans_inertia_never_rises(p in matrix(25, 2), k in 1usize..6, seed in any::<u64>()) {
        let run = kmeans_single(&p, k, seed, 300).unwrap();
        for w in run.inertia_trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12);
        }
        prop_assert!(run.labels.iter().all(|&l| l < k));
    }

    #[test]
    fn config_json_round_trip(
        n in 1usize..500,
        d in prop::option::of(1usize..50),
        lambda in 1e-3f64..1e4,
        knn in 1usize..20,
        sigma in prop::option::of(prop::option::of(1e-3f64..10.0)),
        tol in prop::option::of(1e-12f64..1e-2),
        seed in any::<u64>(),
        method in prop_oneof![Just(Method::SketchLsr), Just(Method::SketchSsc), Just(Method::SketchLrr)],
        kind in sketch_kind(),
        noise in 0.0f64..1.0,
    ) {
        let synth = SynthSpec { subspaces: 3, ambient_dim: 60, subspace_dim: 4, points_per_subspace: 10, noise_std: noise, seed };
        let mut cfg = PipelineConfig::new(InputSpec::Synth(synth), method, n, lambda, knn, 3);
        cfg.d = d;
        cfg.sketch = kind;
        cfg.tol = tol;
        cfg.seed = seed;
        if let Some(s) = sigma {
            cfg.affinity = AffinitySpec::Heat { sigma: s };
        }
        let json = serde_json::to_string(&cfg).unwrap();
        let back: PipelineConfig = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.run_id(), cfg.run_id());
    }
}
