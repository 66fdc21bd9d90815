use std::sync::Arc;

use num_complex::Complex64;
use sparsedom::covering::ball_partition;
use sparsedom::operators::{truncate, CzFamily, CzKernel, IdentityFamily, SingleScaleFamily};
use sparsedom::space::{build_grid_space, GridSpec};
use sparsedom::stopping::{build_stopping_ladder, StoppingConfig};
use sparsedom::verify::{
    cz_decompose, generate, parabola_arc_family, sharpness_oracle, sharpness_sweep, stopping_form, summarize,
    telescoping_check, verify_sparse_linear, weight_constants, weighted_bound, weighted_exponent, weighted_norm_sample,
    write_verdicts, FunctionKind, SparseCase,
};
use sparsedom::{Error, GridFunction, HomogeneousSpace};

fn line(e: f64) -> Arc<HomogeneousSpace> {
    Arc::new(build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![e])).unwrap())
}

fn spike_pair(s: &HomogeneousSpace, s0: i32) -> (GridFunction, GridFunction) {
    let b0 = s.ball(s.origin(), s0);
    let mut f1 = GridFunction::indicator(s.len(), b0.members());
    f1.set(s.origin() + 20, Complex64::new(1e4, 0.0));
    (f1, GridFunction::indicator(s.len(), b0.members()))
}

#[test]
fn cz_decomposition_is_exact_on_ladder_levels() {
    let s = line(2048.0);
    let b0 = s.ball(s.origin(), 7);
    let (f1, f2) = spike_pair(&s, 7);
    let cfg = StoppingConfig::new(&s, 4.0, 1.0, 1.0);
    let ladder = build_stopping_ladder(&s, &f1, &f2, &b0, &cfg).unwrap();
    let balls = &ladder.levels[1].balls;
    let phi = ball_partition(&s, balls);
    let cz = cz_decompose(&s, &f1, &b0, cfg.c_o, cfg.q, balls, &phi, 1.0).unwrap();
    assert!(cz.reconstruction_error <= 1e-12, "{}", cz.reconstruction_error);
    assert!(cz.mean_defect <= 1e-12, "{}", cz.mean_defect);
    assert!(cz.supported);
    assert!(cz.good_constant.is_finite() && cz.bad_constant.is_finite());
    // Off the union of the balls the good part is h itself.
    let covered: Vec<bool> = (0..s.len()).map(|x| balls.iter().any(|b| b.contains(x))).collect();
    for x in (0..s.len()).filter(|&x| !covered[x]) {
        assert_eq!(cz.good.get(x), f1.get(x));
    }
}

#[test]
fn cz_rejects_balls_too_large_for_l() {
    let s = line(256.0);
    let l = s.ball(s.origin(), 4);
    let big = vec![s.ball(s.origin(), 4)];
    let phi = ball_partition(&s, &big);
    let h = GridFunction::indicator(s.len(), l.members());
    assert!(matches!(cz_decompose(&s, &h, &l, 4.0, 40.0, &big, &phi, 1.0), Err(Error::Check(_))));
}

#[test]
fn telescoping_identity_holds_on_a_deep_ladder() {
    let s = line(2048.0);
    let b0 = s.ball(s.origin(), 7);
    let (f1, f2) = spike_pair(&s, 7);
    let cfg = StoppingConfig::new(&s, 4.0, 1.0, 1.0);
    let ladder = build_stopping_ladder(&s, &f1, &f2, &b0, &cfg).unwrap();
    assert_eq!(ladder.depth(), 2);
    let fam = CzFamily::new(s.clone(), CzKernel::hilbert()).unwrap();
    for sigma in [*fam.scales().start(), 0, 2, 5] {
        let r = telescoping_check(&fam, &ladder, sigma, &f1, &f2).unwrap();
        assert!(r.rel_error <= 1e-10, "σ = {sigma}: {r:?}");
        assert!(r.forms >= 1);
    }
}

#[test]
fn stopping_form_without_balls_is_the_truncated_pairing() {
    let s = line(512.0);
    let fam = CzFamily::new(s.clone(), CzKernel::hilbert()).unwrap();
    let l = s.ball(s.origin(), 5);
    let h1 = generate(&s, FunctionKind::Random, &l, 3).unwrap();
    let h2 = generate(&s, FunctionKind::RandomSmooth, &s.ball(s.origin(), 6), 4).unwrap();
    let got = stopping_form(&fam, &l, &[], &[], 1, &h1, &h2).unwrap();
    let want = truncate(&fam, 1, 5, &h1).inner(&s, &h2);
    assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0));
}

#[test]
fn identity_family_verdict_matches_closed_form() {
    let s = line(512.0);
    let fam = IdentityFamily::new(s.clone(), 0..=8);
    let b0 = s.ball(s.origin(), 5);
    let f = GridFunction::indicator(s.len(), b0.members());
    let cfg = StoppingConfig::new(&s, fam.c_o(), 1.0, 1.0);
    let case = SparseCase { scenario: "identity".into(), seed: 0, sigma: 4, tau: 5 };
    let v = verify_sparse_linear(&fam, &b0, &case, &f, &f, &cfg).unwrap();
    assert!((v.pairing - b0.measure()).abs() < 1e-9);
    assert!(v.sparse_form > 0.0);
    let top = b0.dilate(&s, cfg.c_o).measure();
    assert!(v.ratio <= top / b0.measure() + 1e-9, "{v:?}");
}

#[test]
fn sparse_case_rejects_tau_above_b0() {
    let s = line(256.0);
    let fam = IdentityFamily::new(s.clone(), 0..=8);
    let b0 = s.ball(s.origin(), 3);
    let f = GridFunction::indicator(s.len(), b0.members());
    let cfg = StoppingConfig::new(&s, fam.c_o(), 1.0, 1.0);
    let case = SparseCase { scenario: "x".into(), seed: 0, sigma: 0, tau: 4 };
    assert!(verify_sparse_linear(&fam, &b0, &case, &f, &f, &cfg).is_err());
}

#[test]
fn verdict_csv_and_summary() {
    let s = line(512.0);
    let fam = CzFamily::new(s.clone(), CzKernel::hilbert()).unwrap();
    let b0 = s.ball(s.origin(), 6);
    let cfg = StoppingConfig::new(&s, fam.c_o(), 1.0, 1.0);
    let mut out = Vec::new();
    for seed in 0..3 {
        let f1 = generate(&s, FunctionKind::Random, &b0, seed).unwrap();
        let f2 = generate(&s, FunctionKind::Random, &b0, seed + 100).unwrap();
        let case = SparseCase { scenario: "hilbert".into(), seed, sigma: 0, tau: 6 };
        out.push(verify_sparse_linear(&fam, &b0, &case, &f1, &f2, &cfg).unwrap());
    }
    let sum = summarize(&out);
    assert_eq!(sum.count, 3);
    assert!(sum.max >= sum.median && sum.max.is_finite());
    let mut buf = Vec::new();
    write_verdicts(&out, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("scenario,seed,sigma,tau,pairing,sparse_form,ratio,depth,zeta,theta\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn unit_weight_has_trivial_constants() {
    let s = line(64.0);
    let w = vec![1.0; s.len()];
    let r = weight_constants(&s, &w, 2.0, 3.0).unwrap();
    assert!((r.a_p - 1.0).abs() < 1e-12 && (r.rh_q - 1.0).abs() < 1e-12);
    let r1 = weight_constants(&s, &w, 1.0, 2.0).unwrap();
    assert!((r1.a_p - 1.0).abs() < 1e-12);
}

#[test]
fn power_weight_constants_grow_with_the_exponent() {
    let s = line(128.0);
    let grid = s.grid().unwrap();
    let weight = |a: f64| -> Vec<f64> { (0..s.len()).map(|x| (1.0 + grid.position(x)[0].abs()).powf(a)).collect() };
    let small = weight_constants(&s, &weight(0.2), 2.0, 2.0).unwrap();
    let large = weight_constants(&s, &weight(0.5), 2.0, 2.0).unwrap();
    assert!(small.a_p > 1.0 && small.a_p.is_finite());
    assert!(large.a_p > small.a_p);
    assert!(large.rh_q > small.rh_q);
}

#[test]
fn weights_with_zeros_are_rejected() {
    let s = line(16.0);
    let mut w = vec![1.0; s.len()];
    w[3] = 0.0;
    assert!(weight_constants(&s, &w, 2.0, 2.0).is_err());
}

#[test]
fn weighted_exponent_formula() {
    // p1 = 1, p2 = 1 (p2′ = ∞): exponent 1/(p − 1).
    assert!((weighted_exponent(2.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    // p1 = 1, p2 = 2 (p2′ = 2), p = 1.5: max(2, 1/0.5) = 2.
    assert!((weighted_exponent(1.5, 1.0, 2.0).unwrap() - 2.0).abs() < 1e-12);
    assert!(weighted_exponent(1.0, 1.0, 1.0).is_err());
}

#[test]
fn weighted_norm_sample_is_consistent_with_the_bound() {
    let s = line(256.0);
    let fam = CzFamily::new(s.clone(), CzKernel::hilbert()).unwrap();
    let grid = s.grid().unwrap();
    let w: Vec<f64> = (0..s.len()).map(|x| (1.0 + grid.position(x)[0].abs()).powf(0.3)).collect();
    let sample = weighted_norm_sample(&fam, 0, 5, &w, 2.0, 20, 7).unwrap();
    let bound = weighted_bound(&s, &w, 2.0, 1.0, 1.0).unwrap();
    assert!(sample > 0.0 && sample.is_finite());
    assert!(bound >= 1.0 && bound.is_finite());
}

#[test]
fn sharpness_sweep_is_monotone_and_close_to_the_oracle() {
    let step = 2f64.powi(-6);
    let fam = parabola_arc_family(step, 1.25, 512).unwrap();
    let deltas = [0.25, 0.125, 0.0625];
    let sweep = sharpness_sweep(&fam, &deltas).unwrap();
    for w in sweep.rows.windows(2) {
        assert!(w[1].v <= w[0].v && w[1].m <= w[0].m, "{:?}", sweep.rows);
    }
    let oracle = sharpness_oracle(step / 2.0, &deltas).unwrap();
    assert!((sweep.value_slope() - oracle.value_slope()).abs() <= 0.15, "{sweep:?} {oracle:?}");
    assert!((sweep.measure_slope() - oracle.measure_slope()).abs() <= 0.15, "{sweep:?} {oracle:?}");
    let mut buf = Vec::new();
    sweep.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("delta,v,m\n"));
    assert!(text.lines().last().unwrap().starts_with("slope,"));
}

#[test]
fn sharpness_rejects_unresolved_delta() {
    let step = 2f64.powi(-5);
    let fam = parabola_arc_family(step, 1.25, 256).unwrap();
    assert!(sharpness_sweep(&fam, &[0.25, 0.125, step]).is_err());
    assert!(sharpness_oracle(step, &[0.25, 0.125]).is_err());
}
