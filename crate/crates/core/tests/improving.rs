use std::sync::Arc;

use sparsedom::improving::{
    check_improving_a, check_improving_b, continuity_fit, converse_extract, dini_norm, fourier_decay_fit, make_atom,
    translate, ImprovingConfig, Modulus, ShellSampling,
};
use sparsedom::operators::{
    radon_curve_measure, Angular, CzFamily, CzKernel, DiscreteMeasure, IdentityFamily, MeasureFamily, ZeroFamily,
};
use sparsedom::space::{build_grid_space, GridSpec};
use sparsedom::{GridFunction, HomogeneousSpace};

fn line(e: f64) -> Arc<HomogeneousSpace> {
    Arc::new(build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![e])).unwrap())
}

#[test]
fn atoms_need_two_points() {
    let s = line(8.0);
    let a = make_atom(&s, &s.ball(s.origin(), 1), 2.0, 5).unwrap();
    assert_eq!(a.ball.len(), 3);
    assert!(a.mean_defect(&s) < 1e-12);
    assert!((a.values.avg_p(&s, 2.0, a.ball.members()) - 1.0).abs() < 1e-12);
    assert!(make_atom(&s, &s.ball(s.origin(), 0), 1.0, 1).is_err());
}

#[test]
fn atoms_are_deterministic_and_normalized() {
    let s = line(64.0);
    for seed in 0..10 {
        let b = s.ball(s.origin() + seed as usize, 3);
        let a = make_atom(&s, &b, 1.5, seed).unwrap();
        let again = make_atom(&s, &b, 1.5, seed).unwrap();
        assert_eq!(a.values, again.values);
        assert!(a.mean_defect(&s) < 1e-12);
        assert!((a.values.avg_p(&s, 1.5, b.members()) - 1.0).abs() < 1e-12);
        assert!(a.values.support().iter().all(|&x| b.contains(x)));
    }
}

#[test]
fn identity_and_flat_kernel_part_a() {
    let s = line(512.0);
    let id = IdentityFamily::new(s.clone(), 0..=6);
    let cfg = ImprovingConfig::for_family(&id, 40, 3);
    let a = check_improving_a(&id, 3, 2.0, 2.0, &cfg).unwrap();
    assert!(a.i_emp > 0.3 && a.i_emp <= 1.0 + 1e-12);
    let flat = CzFamily::new(s.clone(), CzKernel::flat()).unwrap();
    let cfg = ImprovingConfig::for_family(&flat, 40, 3);
    let a = check_improving_a(&flat, 4, 1.0, 1.0, &cfg).unwrap();
    assert!(a.i_emp.is_finite() && a.i_emp > 0.0 && a.i_emp < 10.0);
}

#[test]
fn hilbert_modulus_is_linear() {
    let s = line(1024.0);
    let h = CzFamily::new(s.clone(), CzKernel::hilbert()).unwrap();
    let cfg = ImprovingConfig::for_family(&h, 60, 11);
    let table = check_improving_b(&h, 6, 1.0, 1.0, &[1, 2, 3, 4, 5, 6], &cfg).unwrap();
    let fit = table.fit.unwrap();
    assert!(fit.slope >= 0.8, "slope {}", fit.slope);
    assert!(table.rows.windows(2).all(|w| w[1].2 >= w[0].2));
}

#[test]
fn dini_values() {
    assert!((dini_norm(&Modulus::<f64>::power(1.0)).unwrap().value - 1.0).abs() < 0.15);
    assert!((dini_norm(&Modulus::<f64>::power(0.5)).unwrap().value - 2.0).abs() < 0.3);
    assert!(dini_norm(&Modulus::<f64>::log()).unwrap().divergent);
}

#[test]
fn decay_exponents() {
    let sampling = ShellSampling::default();
    let point = fourier_decay_fit(&DiscreteMeasure::point_mass(2), &sampling).unwrap();
    assert!(point.beta.abs() <= 0.05);
    let circle = fourier_decay_fit(&DiscreteMeasure::circle(8192).unwrap(), &sampling).unwrap();
    let parabola = fourier_decay_fit(&radon_curve_measure(2, Angular::Even, 65536).unwrap(), &sampling).unwrap();
    assert!(circle.beta >= 0.45);
    assert!(parabola.beta >= 0.45);
    let mut doubled = circle_measure_doubled();
    doubled.label = "doubled".into();
    let d = fourier_decay_fit(&doubled, &sampling).unwrap();
    assert!((d.beta - circle.beta).abs() < 1e-12);
    assert!(fourier_decay_fit(&DiscreteMeasure::point_mass(2), &ShellSampling { shells: 3..=5, ..sampling }).is_err());
}

fn circle_measure_doubled() -> DiscreteMeasure {
    let c = DiscreteMeasure::circle(8192).unwrap();
    DiscreteMeasure::new(2, c.points.clone(), c.masses.iter().map(|m| m * 2.0).collect(), "x").unwrap()
}

#[test]
fn continuity_baselines() {
    let s = line(512.0);
    let grid = s.grid().unwrap();
    let f = GridFunction::from_real((0..s.len()).map(|i| (i % 7) as f64).collect());
    assert_eq!(translate(grid, &f, &[0]).unwrap(), f);
    assert!(translate(grid, &f, &[1]).is_none());
    let h = CzFamily::new(s.clone(), CzKernel::hilbert()).unwrap();
    let cfg = ImprovingConfig::for_family(&h, 20, 2);
    let table = continuity_fit(&h, 5, 1.0, 1.0, 5, &cfg).unwrap();
    assert!(table.exponent().unwrap() > 0.0);
}

#[test]
fn converse_zero_operator() {
    let s = line(256.0);
    let z = ZeroFamily::new(s.clone(), 0..=5);
    let cfg = ImprovingConfig::for_family(&z, 10, 1);
    let r = converse_extract(&[0.0], &z, 3, 1.0, 1.0, &cfg).unwrap();
    assert_eq!(r.i_conv, 0.0);
    assert!(converse_extract(&[], &z, 3, 1.0, 1.0, &cfg).is_err());
}

#[test]
fn parabola_family_part_a_is_finite() {
    let space = Arc::new(build_grid_space(&GridSpec::new(vec![1.0, 2.0], 1.0 / 16.0, vec![4.0, 8.0])).unwrap());
    let fam = MeasureFamily::new(space, radon_curve_measure(2, Angular::Even, 2048).unwrap(), -2..=1).unwrap();
    let cfg = ImprovingConfig::for_family(&fam, 12, 5);
    let a = check_improving_a(&fam, 0, 1.5, 1.5, &cfg).unwrap();
    assert!(a.trials_used > 0);
    assert!(a.i_emp > 0.0 && a.i_emp.is_finite());
}
