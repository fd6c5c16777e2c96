mod common;

use matgraph::autodiff::{eval_jac, finite_diff_jac};
use matgraph::cgr::{parse_cgr, render_cgr};
use matgraph::cli::{read_matrix_csv, write_matrix_csv};
use matgraph::error_analysis::{eval_runerr, RunErrMode};
use matgraph::numerics::{BigReal, Complex, Matrix, Real};
use matgraph::{compress_graph, eval_graph, ComputationGraph, Pointwise};
use proptest::prelude::*;

use common::*;

fn tame_graph(seed: u64, size: usize, pts: &[f64]) -> Option<ComputationGraph<f64>> {
    let g = random_graph(&mut rng(seed), size, true);
    tame_at(&g, pts, 0.2, 1e3).then_some(g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobian_matches_central_differences(seed in any::<u64>(), size in 2usize..12, pts in prop::collection::vec(-1.0f64..1.0, 1..6)) {
        let Some(g) = tame_graph(seed, size, &pts) else { return Ok(()) };
        let refs = g.all_coeff_refs();
        let j = eval_jac(&g, &pts, &refs).unwrap();
        // central differences at 256 bits with a tiny step are accurate far
        // beyond binary64, so they serve as the reference
        let gb = g.convert::<BigReal>(256).unwrap();
        let pb: Vec<BigReal> = pts.iter().map(|x| BigReal::from_f64(*x, 256)).collect();
        let f = finite_diff_jac(&gb, &pb, &refs, &BigReal::from_i64_2exp(1, -80, 256)).unwrap();
        for (a, b) in j.entries.data().iter().zip(f.entries.data()) {
            let b = b.to_f64();
            if a.abs() >= 1e-10 {
                prop_assert!((a - b).abs() <= 1e-6 * a.abs(), "{a} vs {b}");
            }
        }
        // binary64 differences with h = 1e-7 agree up to their rounding floor
        let f64d = finite_diff_jac(&g, &pts, &refs, &1e-7).unwrap();
        let scale = j.values.iter().chain(j.entries.data()).fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in j.entries.data().iter().zip(f64d.entries.data()) {
            prop_assert!((a - b).abs() <= 1e-6 * a.abs() + 1e-7 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn compression_keeps_the_function(seed in any::<u64>(), size in 2usize..14, pts in prop::collection::vec(-1.0f64..1.0, 1..6)) {
        let Some(g) = tame_graph(seed, size, &pts) else { return Ok(()) };
        let mut c = g.clone();
        compress_graph(&mut c);
        prop_assert!(c.len() <= g.len());
        let x = Pointwise(pts.clone());
        let (a, b) = (eval_graph(&g, &x).unwrap().0, eval_graph(&c, &x).unwrap().0);
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() <= 10.0 * f64::EPSILON / 2.0 * scale.max(f64::MIN_POSITIVE));
        }
        // compressing twice changes nothing
        let mut c2 = c.clone();
        compress_graph(&mut c2);
        prop_assert_eq!(c2, c);
    }

    #[test]
    fn cgr_roundtrip_is_exact(seed in any::<u64>(), size in 1usize..14) {
        let g = random_graph(&mut rng(seed), size, true);
        let back = parse_cgr::<f64>(&render_cgr(&g, &[])).unwrap().graph;
        // the file holds the nodes the outputs depend on
        let mut want = g.clone();
        let keep = g.topo_order();
        loop {
            let drop: Vec<String> = want.node_ids().filter(|id| !keep.iter().any(|k| k == id)).map(String::from).collect();
            if drop.is_empty() {
                break;
            }
            for id in drop {
                let _ = want.del_node(&id);
            }
        }
        prop_assert_eq!(back, want);
    }

    #[test]
    fn topological_order_respects_parents(seed in any::<u64>(), size in 1usize..16) {
        let g = random_graph(&mut rng(seed), size, true);
        let order = g.topo_order();
        for (i, id) in order.iter().enumerate() {
            let (l, r) = g.parents(id).unwrap();
            for p in [l, r] {
                if let Some(j) = order.iter().position(|x| x == p) {
                    prop_assert!(j < i);
                }
            }
        }
    }

    #[test]
    fn diagonalizable_matrix_matches_scalar_values(seed in any::<u64>(), size in 2usize..10) {
        let mut r = rng(seed ^ 0x5eed);
        let lam: Vec<f64> = (0..4).map(|k| -0.9 + 0.55 * k as f64).collect();
        let Some(g) = tame_graph(seed, size, &lam) else { return Ok(()) };
        let v = Matrix::lincomb(&1.0, &Matrix::identity(4), &1.0, &randn(&mut r, 4, 0.15)).unwrap();
        let vinv = v.lu_solve(&Matrix::identity(4)).unwrap();
        let d = |x: &[f64]| Matrix::from_fn(4, 4, |i, j| if i == j { x[i] } else { 0.0 });
        let a = v.matmul(&d(&lam)).unwrap().matmul(&vinv).unwrap();
        let glam = eval_graph(&g, &Pointwise(lam.clone())).unwrap().0;
        let want = v.matmul(&d(&glam)).unwrap().matmul(&vinv).unwrap();
        prop_assert!(max_rel_dev(&eval_graph(&g, &a).unwrap(), &want) <= 1e-10);
    }

    #[test]
    fn random_estimate_stays_below_the_bound(seed in any::<u64>(), size in 2usize..12, x in -1.0f64..1.0, s in any::<u64>()) {
        let Some(g) = tame_graph(seed, size, &[x]) else { return Ok(()) };
        let b = eval_runerr(&g, &x, "A", RunErrMode::Bound, &f64::EPSILON).unwrap();
        let r = eval_runerr(&g, &x, "A", RunErrMode::Rand { seed: s }, &f64::EPSILON).unwrap();
        prop_assert_eq!(b.value, r.value);
        prop_assert!(r.delta <= b.delta * (1.0 + 1e-12), "{} > {}", r.delta, b.delta);
    }

    #[test]
    fn matrix_csv_roundtrip(n in 1usize..5, vals in prop::collection::vec((-1e6f64..1e6, -1e3f64..1e3), 16)) {
        let m = Matrix::from_fn(n, n, |i, j| { let (a, b) = vals[i * 4 + j]; Complex::new(a, b) });
        prop_assert_eq!(read_matrix_csv(&write_matrix_csv(&m)).unwrap(), m);
    }
}
