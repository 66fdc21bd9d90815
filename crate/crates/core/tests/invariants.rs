//! Property tests for the structural invariants of each module.

use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use sparsedom::covering::{ball_partition, five_r_cover, partition_of_unity, scale_cover, whitney_cover};
use sparsedom::improving::make_atom;
use sparsedom::operators::{
    adjoint_defect, linearity_defect, maximal, CzFamily, CzKernel, DiscreteMeasure, MeasureFamily,
};
use sparsedom::space::{build_grid_space, GridSpec};
use sparsedom::stopping::{build_stopping_ladder, sparse_form, StoppingConfig};
use sparsedom::verify::{cz_decompose, telescoping_check};
use sparsedom::{Dilations, GridFunction, HomogeneousSpace};

fn line(e: f64) -> Arc<HomogeneousSpace> {
    Arc::new(build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![e])).unwrap())
}

fn plane() -> Arc<HomogeneousSpace> {
    Arc::new(build_grid_space(&GridSpec::new(vec![1.0, 2.0], 0.25, vec![4.0, 8.0])).unwrap())
}

/// Indicator of `B0` plus a few spikes of the given heights inside `B0`.
fn spiky(s: &HomogeneousSpace, s0: i32, spikes: &[(usize, f64)]) -> GridFunction {
    let b0 = s.ball(s.origin(), s0);
    let mut f = GridFunction::indicator(s.len(), b0.members());
    for &(k, h) in spikes {
        let x = b0.members()[k % b0.len()];
        f.set(x, Complex64::new(1.0 + h, 0.0));
    }
    f
}

fn spikes() -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((0usize..1000, prop_oneof![Just(0.0), 10.0..1e4f64]), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rho_is_homogeneous(x in prop::collection::vec(-10.0..10.0f64, 3), k in -6i32..6) {
        let d = Dilations::new(vec![1.0, 2.0, 3.0]).unwrap();
        let t = 2f64.powi(k);
        let lhs = d.rho(&d.dilate(t, &x));
        prop_assert!((lhs - t * d.rho(&x)).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn metric_symmetry_and_quasi_triangle(i in 0usize..10_000, j in 0usize..10_000, k in 0usize..10_000) {
        let s = plane();
        let (x, y, z) = (i % s.len(), j % s.len(), k % s.len());
        prop_assert_eq!(s.dist(x, y), s.dist(y, x));
        prop_assert!(s.dist(x, z) <= s.c_d() * (s.dist(x, y) + s.dist(y, z)) * (1.0 + 1e-12));
    }

    #[test]
    fn five_r_selection_is_disjoint_and_covers(centers in prop::collection::vec((0usize..129, 0i32..4), 1..12)) {
        let s = line(64.0);
        let balls: Vec<_> = centers.iter().map(|&(c, k)| s.ball(c, k)).collect();
        let picked = five_r_cover(&s, &balls);
        let mut seen = vec![false; s.len()];
        for &i in &picked {
            for &x in balls[i].members() {
                prop_assert!(!seen[x]);
                seen[x] = true;
            }
        }
        let mut five = vec![false; s.len()];
        for &i in &picked {
            for &x in balls[i].dilate(&s, 5.0).members() {
                five[x] = true;
            }
        }
        prop_assert!(balls.iter().flat_map(|b| b.members()).all(|&x| five[x]));
    }

    #[test]
    fn partitions_sum_to_one(s0 in 1i32..4, lo in 0usize..60, len in 4usize..60) {
        let s = line(64.0);
        let host = s.ball(s.origin(), 5);
        let cover = sparsedom::covering::fixed_scale_cover(&s, &host, s0);
        let pu = partition_of_unity(&s, &cover.balls, s0, 2.0).unwrap();
        for (x, total) in pu.sum(s.len()).into_iter().enumerate() {
            if pu.covered[x] {
                prop_assert!((total - 1.0).abs() <= 1e-12);
            }
        }
        let omega: Vec<bool> = (0..s.len()).map(|x| x >= lo + 10 && x < lo + 10 + len).collect();
        let w = whitney_cover(&s, &omega, 8.0).unwrap();
        let phi = ball_partition(&s, &w.balls);
        let mut total = vec![0.0; s.len()];
        for bump in &phi {
            for &(x, v) in bump {
                total[x] += v;
            }
        }
        for b in &w.balls {
            for &x in b.members() {
                prop_assert!((total[x] - 1.0).abs() <= 1e-12);
            }
        }
        let again = whitney_cover(&s, &omega, 8.0).unwrap();
        prop_assert_eq!(
            w.balls.iter().map(|b| (b.center(), b.scale())).collect::<Vec<_>>(),
            again.balls.iter().map(|b| (b.center(), b.scale())).collect::<Vec<_>>()
        );
        let _ = scale_cover(&s, s0);
    }

    #[test]
    fn atoms_are_supported_mean_zero_and_normalized(c in 0usize..129, k in 1i32..5, p in 1.0..4.0f64, seed in any::<u64>()) {
        let s = line(64.0);
        let b = s.ball(c, k);
        let a = make_atom(&s, &b, p, seed).unwrap();
        prop_assert!(a.values.support().iter().all(|&x| b.contains(x)));
        prop_assert!(a.mean_defect(&s) <= 1e-12);
        prop_assert!((a.values.avg_p(&s, p, b.members()) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn ladders_nest_halve_and_telescope(sp in spikes(), sigma in -1i32..4) {
        let s = line(512.0);
        let b0 = s.ball(s.origin(), 5);
        let f1 = spiky(&s, 5, &sp);
        let f2 = spiky(&s, 5, &sp.iter().map(|&(k, h)| (k + 7, h / 3.0)).collect::<Vec<_>>());
        let cfg = StoppingConfig::new(&s, 4.0, 1.0, 1.0);
        let ladder = build_stopping_ladder(&s, &f1, &f2, &b0, &cfg).unwrap();
        prop_assert!(ladder.nested());
        prop_assert!(ladder.halving.pass());
        let fam = CzFamily::new(s.clone(), CzKernel::hilbert()).unwrap();
        let r = telescoping_check(&fam, &ladder, sigma, &f1, &f2).unwrap();
        prop_assert!(r.rel_error <= 1e-10, "{:?}", r);
        if ladder.levels.len() > 1 && !ladder.levels[1].is_empty() {
            let balls = &ladder.levels[1].balls;
            let phi = ball_partition(&s, balls);
            let cz = cz_decompose(&s, &f1, &b0, cfg.c_o, cfg.q, balls, &phi, 1.0).unwrap();
            prop_assert!(cz.reconstruction_error <= 1e-12);
            prop_assert!(cz.mean_defect <= 1e-12);
        }
    }

    #[test]
    fn sparse_form_is_homogeneous(a in 0.01..100.0f64, b in 0.01..100.0f64, p1 in 1.0..3.0f64, p2 in 1.0..3.0f64) {
        let s = line(128.0);
        let balls = vec![s.ball(s.origin(), 3), s.ball(s.origin() + 40, 2)];
        let f1 = spiky(&s, 5, &[(3, 50.0)]);
        let f2 = spiky(&s, 5, &[(9, 5.0)]);
        let base = sparse_form(&s, &balls, &f1, &f2, p1, p2, 2.0);
        let scaled = sparse_form(&s, &balls, &f1.scale(Complex64::new(-a, 0.0)), &f2.scale(Complex64::new(0.0, b)), p1, p2, 2.0);
        prop_assert!((scaled - a * b * base).abs() <= 1e-10 * a * b * base);
    }

    #[test]
    fn operators_are_linear_with_exact_adjoints(seed in any::<u64>()) {
        let s = line(128.0);
        let fam = CzFamily::new(s, CzKernel::hilbert()).unwrap();
        prop_assert!(linearity_defect(&fam, 3, seed) <= 1e-10);
        prop_assert!(adjoint_defect(&fam, 3, seed) <= 1e-10);
    }

    #[test]
    fn circle_maximal_function_is_bounded_on_linf(vals in prop::collection::vec(-1.0..1.0f64, 49)) {
        let s = Arc::new(build_grid_space(&GridSpec::new(vec![1.0, 1.0], 1.0, vec![12.0])).unwrap());
        let fam = MeasureFamily::new(s.clone(), DiscreteMeasure::circle(64).unwrap(), 0..=2).unwrap();
        let mut f = GridFunction::zeros(s.len());
        for (k, &v) in vals.iter().enumerate() {
            f.set(s.origin() + k, Complex64::new(v, 0.0));
        }
        let sup = f.abs().into_iter().fold(0.0, f64::max);
        let m = maximal(&fam, 0, 3, &f);
        prop_assert!(m.into_iter().all(|v| v <= sup * (1.0 + 1e-12)));
    }
}
