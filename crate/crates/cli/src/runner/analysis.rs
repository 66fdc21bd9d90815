use std::fs::File;
use std::path::Path;
use std::sync::Arc;

use sparsedom::improving::{
    check_improving_a, check_improving_b, converse_extract, dual_exponent, fourier_decay_fit, ImprovingConfig,
    ShellSampling,
};
use sparsedom::space::build_grid_space;
use sparsedom::stopping::StoppingConfig;
use sparsedom::verify::{
    parabola_arc_family, sharpness_oracle, sharpness_sweep, verify_sparse_linear, weight_constants, weighted_exponent,
    weighted_norm_sample, SparseCase,
};

use super::{build, space_of};
use crate::config::Scenario;
use crate::summary::{fmt_num, Summary};
use crate::CliError;

fn table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn improving(sc: &Scenario, out: &Path) -> Result<Summary, CliError> {
    let space = space_of(sc)?;
    let op = sc.operator.as_ref().expect("validated");
    let fam = build::family(op, &space)?;
    let ex = sc.exponents.expect("validated");
    let s = sc.check.s.expect("validated");
    let cfg = ImprovingConfig::for_family(fam.as_ref(), sc.check.trials.unwrap_or(60), sc.seed);
    let a = check_improving_a(fam.as_ref(), s, ex.p1, ex.p2, &cfg)?;
    let mut rows = vec![vec!["i_emp".into(), fmt_num(a.i_emp)], vec!["trials_used".into(), a.trials_used.to_string()]];
    let mut summary = Summary::default();
    summary.push("improving_constant", a.i_emp.is_finite() && a.trials_used > 0, a.i_emp, "finite");

    if let Some(scales) = &sc.check.atom_scales {
        let modulus = check_improving_b(fam.as_ref(), s, ex.p1, ex.p2, scales, &cfg)?;
        modulus.write_csv(File::create(out.join("modulus.csv"))?)?;
        let raw_finite = modulus.rows.iter().all(|r| r.1.is_finite());
        summary.push("modulus_finite", raw_finite, modulus.rows.last().map_or(0.0, |r| r.2), "finite");
        summary.record("modulus_exponent", modulus.exponent().unwrap_or(f64::NAN));
    }

    if sc.check.refine == Some(true) {
        let sec = sc.space.as_ref().expect("validated");
        let mut spec = build::grid_spec(sec)?;
        spec.step /= 2.0;
        spec.site_budget = spec.site_budget.max(4 * space.len());
        let fine = Arc::new(build_grid_space(&spec)?);
        let fine_fam = build::family(op, &fine)?;
        let fine_cfg = ImprovingConfig::for_family(fine_fam.as_ref(), cfg.trials, sc.seed);
        let b = check_improving_a(fine_fam.as_ref(), s, ex.p1, ex.p2, &fine_cfg)?;
        let ratio = b.i_emp / a.i_emp;
        let limit = sc.check.refine_max.unwrap_or(2.0);
        rows.push(vec!["i_emp_half_step".into(), fmt_num(b.i_emp)]);
        rows.push(vec!["refinement_ratio".into(), fmt_num(ratio)]);
        let pass = ratio.is_finite() && ratio > 0.0 && ratio.max(1.0 / ratio) < limit;
        summary.push("refinement", pass, ratio, format!("max(r, 1/r) < {limit}"));
    }

    if sc.check.converse == Some(true) {
        let funcs = sc.functions.as_ref().expect("validated");
        let tr = sc.truncation.expect("validated");
        let mut stop = StoppingConfig::new(&space, fam.c_o(), ex.p1, ex.p2);
        stop.zeta_min = sc.check.zeta_min;
        let mut ratios = Vec::with_capacity(sc.seeds);
        for i in 0..sc.seeds {
            let (f1, f2, b0, _) = build::functions(&space, funcs, sc.seed, i, (ex.p1, ex.p2))?;
            let case = SparseCase { scenario: sc.name.clone(), seed: i as u64, sigma: tr.sigma, tau: tr.tau };
            ratios.push(verify_sparse_linear(fam.as_ref(), &b0, &case, &f1, &f2, &stop)?.ratio);
        }
        let r = converse_extract(&ratios, fam.as_ref(), s, ex.p1, ex.p2, &cfg)?;
        table(
            &out.join("converse.csv"),
            &["sparse_constant", "i_conv", "i_emp", "ratio"],
            &[vec![
                fmt_num(r.sparse_constant),
                fmt_num(r.i_conv),
                fmt_num(r.i_emp),
                r.ratio.map(fmt_num).unwrap_or_default(),
            ]],
        )?;
        let [lo, hi] = sc.check.converse_range.unwrap_or([1.0 / 50.0, 50.0]);
        let ratio = r.ratio.unwrap_or(f64::NAN);
        summary.push("converse_ratio", ratio >= lo && ratio <= hi, ratio, format!("in [{lo}, {hi}]"));
        summary.record("sparse_constant", r.sparse_constant);
    }
    table(&out.join("improving.csv"), &["quantity", "value"], &rows)?;
    Ok(summary)
}

pub fn decay(sc: &Scenario, out: &Path) -> Result<Summary, CliError> {
    let mut sampling = ShellSampling::default();
    if let Some([lo, hi]) = sc.check.shells {
        sampling.shells = lo..=hi;
    }
    if let Some(d) = sc.check.directions {
        sampling.directions = d;
    }
    if let Some(r) = sc.check.radii {
        sampling.radii = r;
    }
    let mut rows = Vec::new();
    let mut summary = Summary::default();
    for target in sc.check.measures.iter().flatten() {
        let m = build::decay_measure(target)?;
        let mut fit = fourier_decay_fit(&m, &sampling)?;
        fit.beta += 0.0;
        for &(j, e) in &fit.envelope {
            rows.push(vec![m.label.clone(), j.to_string(), fmt_num(e)]);
        }
        if let Some(lo) = target.beta_min {
            // A positive decay claim needs a conclusive fit.
            summary.push(format!("beta:{}", m.label), fit.beta >= lo && fit.conclusive(), fit.beta, format!(">= {lo}"));
        }
        if let Some(hi) = target.beta_max {
            summary.push(format!("beta_max:{}", m.label), fit.beta <= hi, fit.beta, format!("<= {hi}"));
        }
        summary.record(format!("r2:{}", m.label), fit.fit.r2);
    }
    table(&out.join("decay.csv"), &["measure", "shell", "sup_abs_fourier"], &rows)?;
    Ok(summary)
}

pub fn sharpness(sc: &Scenario, out: &Path) -> Result<Summary, CliError> {
    let sec = sc.space.as_ref().expect("validated");
    let spec = build::grid_spec(sec)?;
    if spec.exponents.len() != 2 || spec.exponents.iter().any(|&a| a != 1.0) {
        return Err(CliError::Config("sharpness needs an isotropic 2D grid (exponents = [1, 1])".into()));
    }
    let op = sc.operator.as_ref().expect("validated");
    let nodes = op.nodes.ok_or_else(|| CliError::Config("missing operator.nodes".into()))?;
    let fam = parabola_arc_family(spec.step, spec.extent[0], nodes)?;
    let deltas = sc.check.deltas.clone().expect("validated");
    let sweep = sharpness_sweep(&fam, &deltas)?;
    let oracle = sharpness_oracle(spec.step / 2.0, &deltas)?;
    sweep.write_csv(File::create(out.join("sharpness.csv"))?)?;
    oracle.write_csv(File::create(out.join("oracle.csv"))?)?;

    let tol = sc.check.slope_tol.unwrap_or(0.15);
    let mut summary = Summary::default();
    let dv = (sweep.value_slope() - oracle.value_slope()).abs();
    let dm = (sweep.measure_slope() - oracle.measure_slope()).abs();
    summary.push("value_slope_vs_oracle", dv <= tol, dv, format!("<= {tol}"));
    summary.push("measure_slope_vs_oracle", dm <= tol, dm, format!("<= {tol}"));
    let mut by_delta = sweep.rows.clone();
    by_delta.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    let violations = by_delta.windows(2).filter(|w| !(w[1].v < w[0].v && w[1].m < w[0].m)).count();
    summary.push("monotone", violations == 0, violations as f64, "v and m shrink with delta");
    summary.record("value_slope", sweep.value_slope());
    summary.record("measure_slope", sweep.measure_slope());
    summary.record("oracle_value_slope", oracle.value_slope());
    summary.record("oracle_measure_slope", oracle.measure_slope());
    let (a, b, n) = sweep.induced_line(2);
    summary.push("induced_line", a.is_finite() && b.is_finite(), a, format!("{a:.4} + {b:.4}/p2' >= {n}/p1"));
    Ok(summary)
}

pub fn weights(sc: &Scenario, out: &Path) -> Result<Summary, CliError> {
    let space = space_of(sc)?;
    let ex = sc.exponents.expect("validated");
    let p = ex.p.expect("validated");
    let e = weighted_exponent(p, ex.p1, ex.p2)?;
    let q2 = dual_exponent(ex.p2);
    let fam = match &sc.operator {
        Some(op) => Some(build::family(op, &space)?),
        None => None,
    };
    let mut exps = sc.check.weight_exponents.clone().expect("validated");
    exps.sort_by(f64::total_cmp);
    let origin = space.origin();
    let mut rows = Vec::new();
    let mut a_ps = Vec::new();
    let mut summary = Summary::default();
    let mut finite = true;
    for &alpha in &exps {
        let w: Vec<f64> = (0..space.len()).map(|x| (1.0 + space.dist(x, origin)).powf(alpha)).collect();
        let a_p = weight_constants(&space, &w, p / ex.p1, 2.0)?.a_p;
        let rh = if q2.is_infinite() { 1.0 } else { weight_constants(&space, &w, 2.0, dual_exponent(q2 / p))?.rh_q };
        let bound = (a_p * rh).powf(e);
        let sample = match (&fam, sc.truncation) {
            (Some(f), Some(t)) => {
                weighted_norm_sample(f.as_ref(), t.sigma, t.tau, &w, p, sc.check.trials.unwrap_or(40), sc.seed)?
            }
            _ => f64::NAN,
        };
        finite &= a_p.is_finite() && a_p >= 1.0 - 1e-9 && rh.is_finite() && rh >= 1.0 - 1e-9;
        rows.push(vec![alpha.to_string(), fmt_num(a_p), fmt_num(rh), fmt_num(e), fmt_num(bound), fmt_num(sample)]);
        a_ps.push(a_p);
        if sample.is_finite() {
            summary.record(format!("sample_over_bound:{alpha}"), sample / bound);
        }
    }
    table(&out.join("weights.csv"), &["alpha", "a_p", "rh_q", "exponent", "bound", "sample"], &rows)?;
    summary.push("constants_at_least_one", finite, a_ps.iter().copied().fold(0.0, f64::max), "finite, >= 1");
    let drops = a_ps.windows(2).filter(|w| w[1] < w[0] * (1.0 - 1e-9)).count();
    summary.push("a_p_monotone_in_alpha", drops == 0, drops as f64, "nondecreasing");
    Ok(summary)
}
