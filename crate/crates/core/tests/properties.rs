mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stresslayout::graph::{all_pairs_shortest_paths, parse_edge_list, parse_matrix_market};
use stresslayout::init::random_init;
use stresslayout::sgd::{capped_step, pair_update, run_sgd, sgd_iteration, Schedule, SgdConfig};
use stresslayout::smacof::{run_smacof, smacof_iteration};
use stresslayout::stress::{stress, stress_gradient};
use stresslayout::{Graph, Layout, Point, SmacofConfig};

fn assert_simple(g: &Graph) {
    for v in 0..g.vertex_count() {
        assert!(!g.neighbors(v).contains(&v));
        for &u in g.neighbors(v) {
            assert!(g.neighbors(u).contains(&v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parsed_graphs_are_simple(pairs in prop::collection::vec((0u8..20, 0u8..20), 0..60)) {
        let text: String = pairs.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
        let g = parse_edge_list(&text).unwrap();
        assert_simple(&g);

        let mut mtx = format!("%%MatrixMarket matrix coordinate pattern general\n20 20 {}\n", pairs.len());
        for (a, b) in &pairs {
            mtx.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        let g = parse_matrix_market(&mtx).unwrap();
        assert_simple(&g);
        prop_assert_eq!(g.vertex_count(), 20);
    }

    #[test]
    fn apsp_matches_floyd_warshall(n in 1usize..=50, extra in 0usize..40, seed in any::<u64>()) {
        let g = random_connected_graph(n, extra, seed);
        let d = all_pairs_shortest_paths(&g).unwrap();
        let fw = floyd_warshall(&g);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(d.get(i, j), fw[i][j]);
                prop_assert_eq!(d.get(i, j) == 1.0, g.has_edge(i, j));
                for k in 0..n {
                    prop_assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k));
                }
            }
        }
    }

    #[test]
    fn stress_is_rigid_invariant(n in 2usize..20, seed in any::<u64>(), angle in 0.0..6.3f64,
                                 reflect in any::<bool>(), dx in -50.0..50.0f64, dy in -50.0..50.0f64) {
        let g = random_connected_graph(n, n, seed);
        let d = all_pairs_shortest_paths(&g).unwrap();
        let x = random_layout(n, 5.0, seed);
        let s = stress(&x, &d).unwrap();
        prop_assert!(s >= 0.0);
        let moved = rigid_motion(&x, angle, reflect, Point::new(dx, dy));
        let t = stress(&moved, &d).unwrap();
        prop_assert!((s - t).abs() <= 1e-10 * s.max(1e-300) + 1e-12, "{} vs {}", s, t);
        let fw = floyd_warshall(&g);
        prop_assert!((s - naive_stress(&x, &fw)).abs() <= 1e-12 * s.max(1.0));
    }

    #[test]
    fn stress_decreases_along_negative_gradient(n in 3usize..15, seed in any::<u64>()) {
        let g = random_connected_graph(n, n / 2, seed);
        let d = all_pairs_shortest_paths(&g).unwrap();
        let x = random_layout(n, 3.0, seed);
        let grad = stress_gradient(&x, &d).unwrap();
        let norm: f64 = grad.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-8);
        let s0 = stress(&x, &d).unwrap();
        let step = 1e-4 / norm;
        let probe = Layout::new(
            x.points().iter().zip(&grad).map(|(&p, &g)| p - g * step).collect(),
        ).unwrap();
        prop_assert!(stress(&probe, &d).unwrap() < s0);
    }

    #[test]
    fn pair_update_exact_and_midpoint_preserving(
        ax in -100.0..100.0f64, ay in -100.0..100.0f64,
        bx in -100.0..100.0f64, by in -100.0..100.0f64,
        d in 1.0..30.0f64, mu in 0.0..=1.0f64,
    ) {
        let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
        prop_assume!(a.distance(b) > 1e-6);
        let (a1, b1) = pair_update(a, b, d, 1.0).unwrap();
        prop_assert!((a1.distance(b1) - d).abs() <= 1e-12 * d.max(a.distance(b)));
        let (a2, b2) = pair_update(a, b, d, mu).unwrap();
        let mid = (a + b) * 0.5;
        let mid2 = (a2 + b2) * 0.5;
        prop_assert!((mid - mid2).norm() <= 1e-12 * (1.0 + mid.norm()));
    }

    #[test]
    fn schedule_monotone(t_max in 2usize..60, eta_max in 1.0..1e4f64, ratio in 1e-4..0.999f64, d in 1.0..40.0f64) {
        let s = Schedule::new(t_max, eta_max, eta_max * ratio).unwrap();
        prop_assert_eq!(s.eta(0).unwrap(), eta_max);
        prop_assert!((s.eta(t_max - 1).unwrap() / s.eta_min() - 1.0).abs() < 1e-9);
        for t in 1..t_max {
            prop_assert!(s.eta(t).unwrap() < s.eta(t - 1).unwrap());
            let mu = s.mu(t, d).unwrap();
            prop_assert!(mu <= 1.0 && mu > 0.0);
            prop_assert!(mu <= s.mu(t - 1, d).unwrap());
        }
    }

    #[test]
    fn sgd_stays_finite(n in 2usize..25, seed in any::<u64>(), duplicates in any::<bool>()) {
        let g = random_connected_graph(n, n, seed);
        let d = all_pairs_shortest_paths(&g).unwrap();
        let x0 = if duplicates {
            Layout::new(vec![Point::new(0.5, 0.5); n]).unwrap()
        } else {
            random_init(n, seed).unwrap()
        };
        let out = run_sgd(&d, &x0, &SgdConfig::for_distances(&d, seed).unwrap()).unwrap();
        prop_assert!(out.layout.points().iter().all(|p| p.is_finite()));
        prop_assert!(out.stresses.iter().all(|s| s.is_finite()));
    }

    #[test]
    fn smacof_iteration_never_increases_stress(n in 2usize..30, seed in any::<u64>()) {
        let g = random_connected_graph(n, n, seed);
        let d = all_pairs_shortest_paths(&g).unwrap();
        let mut x = random_layout(n, 2.0, seed);
        let mut prev = stress(&x, &d).unwrap();
        for _ in 0..10 {
            smacof_iteration(&mut x, &d).unwrap();
            let cur = stress(&x, &d).unwrap();
            prop_assert!(cur <= prev * (1.0 + 1e-9));
            prev = cur;
        }
    }
}

#[test]
fn mu_cap_examples() {
    assert_eq!(capped_step(5.0, 1.0), 1.0);
    assert!((capped_step(5.0, 10.0) - 0.05).abs() < 1e-16);
}

#[test]
fn sgd_iteration_is_reproducible() {
    let g = random_connected_graph(30, 20, 1);
    let d = all_pairs_shortest_paths(&g).unwrap();
    let s = Schedule::for_distances(&d, 15, 0.01).unwrap();
    let mut a = random_init(30, 5).unwrap();
    let mut b = a.clone();
    sgd_iteration(&mut a, &d, &s, 3, 1e-6, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    sgd_iteration(&mut b, &d, &s, 3, 1e-6, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn smacof_converged_layout_is_locally_optimal() {
    let g = random_connected_graph(25, 15, 3);
    let d = all_pairs_shortest_paths(&g).unwrap();
    let tight = SmacofConfig {
        max_iterations: 20_000,
        rel_tolerance: 1e-15,
        ..SmacofConfig::default()
    };
    let out = run_smacof(&d, &random_init(25, 3).unwrap(), &tight).unwrap();
    let s0 = out.final_stress();
    let pts = out.layout.points().to_vec();
    for v in 0..pts.len() {
        for k in 0..16 {
            let angle = k as f64 * std::f64::consts::TAU / 16.0;
            let mut moved = pts.clone();
            moved[v] += Point::new(angle.cos(), angle.sin()) * 1e-3;
            let s = stress(&Layout::new(moved).unwrap(), &d).unwrap();
            assert!(s0 - s <= 1e-9, "vertex {v} probe {k}: {s0} -> {s}");
        }
    }
}
