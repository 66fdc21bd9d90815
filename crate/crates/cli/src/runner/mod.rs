//! One pipeline per check kind. Every pipeline writes its CSV tables into the
//! output directory and returns the summary; `summary.csv` is written here.

mod analysis;
pub mod build;

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sparsedom::covering::{ball_partition, verify_whitney, whitney_cover};
use sparsedom::stats::{fit_line, max, median};
use sparsedom::stopping::{build_stopping_ladder, StoppingConfig};
use sparsedom::verify::{
    cz_decompose, generate, random_open_set, summarize, telescoping_check, verify_sparse_linear, verify_sparse_maximal,
    write_verdicts, FunctionKind, SparseCase, SparseVerdict,
};

use crate::config::{Kind, Scenario};
use crate::summary::{fmt_num, Summary};
use crate::CliError;
use build::instance_seed;

/// `--out` if given, else `output.dir`, else `out/<name>`.
pub fn output_dir(scenario: &Scenario, cli_out: Option<&Path>) -> PathBuf {
    match (cli_out, &scenario.output.dir) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(d)) => d.clone(),
        (None, None) => PathBuf::from("out").join(&scenario.name),
    }
}

pub fn run(scenario: &Scenario, out: &Path) -> Result<Summary, CliError> {
    fs::create_dir_all(out)?;
    let summary = match scenario.kind {
        Kind::Whitney => whitney(scenario, out)?,
        Kind::Ladder => ladder(scenario, out)?,
        Kind::SparseLinear | Kind::SparseMaximal => sparse(scenario, out)?,
        Kind::Improving => analysis::improving(scenario, out)?,
        Kind::Decay => analysis::decay(scenario, out)?,
        Kind::Sharpness => analysis::sharpness(scenario, out)?,
        Kind::Weights => analysis::weights(scenario, out)?,
    };
    summary.write_csv(&out.join("summary.csv"))?;
    Ok(summary)
}

/// Turns check-type errors of one instance into a recorded failure and passes
/// configuration errors through.
fn soft<T>(r: Result<T, CliError>) -> Result<Result<T, String>, CliError> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) if e.exit_code() == crate::EXIT_FAIL => Ok(Err(e.to_string())),
        Err(e) => Err(e),
    }
}

fn space_of(s: &Scenario) -> Result<std::sync::Arc<sparsedom::HomogeneousSpace>, CliError> {
    build::space(s.space.as_ref().expect("validated"))
}

fn whitney(sc: &Scenario, out: &Path) -> Result<Summary, CliError> {
    let space = space_of(sc)?;
    let eta = sc.check.eta.expect("validated");
    let blobs = sc.check.blobs.unwrap_or(4);
    let results = (0..sc.seeds)
        .into_par_iter()
        .map(|i| {
            let omega = random_open_set(&space, blobs, instance_seed(sc.seed, i, 0));
            let cover = whitney_cover(&space, &omega, eta)?;
            let report = verify_whitney(&space, &cover);
            Ok((cover, report))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut w = csv::Writer::from_writer(File::create(out.join("instances.csv"))?);
    w.write_record(["instance", "omega_sites", "balls", "lambda", "m", "comparability", "neighbor_ratio", "pass"])?;
    for (i, (cover, rep)) in results.iter().enumerate() {
        w.write_record([
            i.to_string(),
            cover.omega.iter().filter(|&&b| b).count().to_string(),
            cover.balls.len().to_string(),
            fmt_num(rep.lambda),
            rep.m.to_string(),
            fmt_num(rep.comparability),
            fmt_num(rep.neighbor_ratio),
            rep.all_pass().to_string(),
        ])?;
    }
    w.flush()?;
    results[0].0.write_csv(&space, File::create(out.join("cover.csv"))?)?;
    let mut summary = Summary::default();
    for (j, prop) in results[0].1.properties.iter().enumerate() {
        let failing = results.iter().filter(|(_, r)| !r.properties[j].pass).count();
        summary.push(format!("whitney_{}", prop.name), failing == 0, failing as f64, "0 failing instances");
    }
    let worst = |f: &dyn Fn(&sparsedom::covering::WhitneyReport) -> f64| {
        max(&results.iter().map(|(_, r)| f(r)).collect::<Vec<_>>())
    };
    summary.record("max_overlap_m", worst(&|r| r.m as f64));
    summary.record("max_lambda", worst(&|r| r.lambda));
    summary.record("max_comparability", worst(&|r| r.comparability));
    summary.record("max_neighbor_ratio", worst(&|r| r.neighbor_ratio));
    Ok(summary)
}

#[derive(Default)]
struct LadderRow {
    depth: usize,
    theta: f64,
    retunes: usize,
    zeta: Option<f64>,
    disjoint: bool,
    measure_ratio: f64,
    radius_ratio: f64,
    nested: bool,
    halving: bool,
    cz_reconstruction: f64,
    cz_mean_defect: f64,
    cz_instances: usize,
    telescope: f64,
}

fn ladder(sc: &Scenario, out: &Path) -> Result<Summary, CliError> {
    let space = space_of(sc)?;
    let funcs = sc.functions.as_ref().expect("validated");
    let ex = sc.exponents.expect("validated");
    let fam = match &sc.operator {
        Some(op) => Some(build::family(op, &space)?),
        None => None,
    };
    let c_o = sc.check.c_o.or(fam.as_ref().map(|f| f.c_o())).expect("validated");
    let mut cfg = StoppingConfig::new(&space, c_o, ex.p1, ex.p2);
    cfg.zeta_min = sc.check.zeta_min;
    let sigmas = sc.check.telescope_sigmas.clone().unwrap_or_default();
    let do_cz = sc.check.cz.unwrap_or(false);
    let rows = (0..sc.seeds)
        .into_par_iter()
        .map(|i| {
            let (f1, f2, b0, gens) = build::functions(&space, funcs, sc.seed, i, (ex.p1, ex.p2))?;
            let built = soft((|| {
                let ladder = build_stopping_ladder(&space, &f1, &f2, &b0, &cfg)?;
                let mut row = LadderRow {
                    depth: ladder.depth(),
                    theta: ladder.theta,
                    retunes: ladder.retunes,
                    zeta: ladder.collection.as_ref().map(|c| c.zeta),
                    disjoint: ladder.collection.as_ref().is_none_or(|c| c.disjoint_and_contained(space.len())),
                    measure_ratio: ladder.halving.measure_ratio,
                    radius_ratio: ladder.halving.radius_ratio,
                    nested: ladder.nested(),
                    halving: ladder.halving.pass(),
                    ..Default::default()
                };
                if do_cz {
                    let top = b0.dilate(&space, cfg.c_o);
                    let noise = generate(&space, FunctionKind::Random, &top, instance_seed(sc.seed, i, 3))?;
                    for level in ladder.levels.iter().skip(1).filter(|l| !l.is_empty()) {
                        let phi = ball_partition(&space, &level.balls);
                        for h in [&f1, &noise] {
                            let cz = cz_decompose(&space, h, &b0, cfg.c_o, cfg.q, &level.balls, &phi, ex.p1)?;
                            if !cz.supported {
                                return Err(CliError::Core(sparsedom::Error::Check("bad part leaves its ball".into())));
                            }
                            row.cz_reconstruction = row.cz_reconstruction.max(cz.reconstruction_error);
                            row.cz_mean_defect = row.cz_mean_defect.max(cz.mean_defect);
                            row.cz_instances += 1;
                        }
                    }
                }
                if let Some(fam) = &fam {
                    for &sigma in &sigmas {
                        let r = telescoping_check(fam.as_ref(), &ladder, sigma, &f1, &f2)?;
                        row.telescope = row.telescope.max(r.rel_error);
                    }
                }
                let sparse = ladder.collection.clone();
                Ok((row, sparse))
            })())?;
            Ok((gens, built))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut w = csv::Writer::from_writer(File::create(out.join("ladders.csv"))?);
    w.write_record([
        "instance",
        "f1",
        "f2",
        "depth",
        "theta",
        "retunes",
        "zeta",
        "measure_ratio",
        "radius_ratio",
        "cz_reconstruction",
        "cz_mean_defect",
        "telescope_error",
        "error",
    ])?;
    for (i, (gens, r)) in rows.iter().enumerate() {
        let mut rec = vec![i.to_string(), gens[0].name().into(), gens[1].name().into()];
        match r {
            Ok((row, _)) => rec.extend([
                row.depth.to_string(),
                fmt_num(row.theta),
                row.retunes.to_string(),
                row.zeta.map(fmt_num).unwrap_or_default(),
                fmt_num(row.measure_ratio),
                fmt_num(row.radius_ratio),
                fmt_num(row.cz_reconstruction),
                fmt_num(row.cz_mean_defect),
                fmt_num(row.telescope),
                String::new(),
            ]),
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 9));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    if let Some((_, Ok((_, Some(c))))) = rows.first() {
        c.write_csv(&space, File::create(out.join("sparse.csv"))?)?;
    }

    let ok: Vec<&LadderRow> = rows.iter().filter_map(|(_, r)| r.as_ref().ok().map(|(row, _)| row)).collect();
    let errors = rows.len() - ok.len();
    let mut summary = Summary::default();
    summary.push("ladders_built", errors == 0, errors as f64, "0 failing instances");
    let not_nested = ok.iter().filter(|r| !r.nested).count();
    summary.push("nesting", not_nested == 0, not_nested as f64, "0 failing instances");
    let worst_measure = max(&ok.iter().map(|r| r.measure_ratio).collect::<Vec<_>>()).max(0.0);
    summary.push("halving", ok.iter().all(|r| r.halving), worst_measure, "|E_k+1|/|E_k| <= 0.5 and r_B/r_L <= 0.5");
    summary.record("max_radius_ratio", max(&ok.iter().map(|r| r.radius_ratio).collect::<Vec<_>>()).max(0.0));
    if let Some(zmin) = sc.check.zeta_min {
        let zetas: Vec<f64> = ok.iter().map(|r| r.zeta.unwrap_or(0.0)).collect();
        let least = zetas.iter().copied().fold(f64::INFINITY, f64::min);
        let pass = errors == 0 && least >= zmin && ok.iter().all(|r| r.disjoint);
        summary.push("certified", pass, least, format!(">= {zmin}"));
    }
    if let Some(d) = sc.check.min_depth {
        let least = ok.iter().map(|r| r.depth).min().unwrap_or(0);
        summary.push("min_depth", errors == 0 && least >= d, least as f64, format!(">= {d}"));
    }
    summary.record("max_depth", ok.iter().map(|r| r.depth).max().unwrap_or(0) as f64);
    summary.record("max_theta", max(&ok.iter().map(|r| r.theta).collect::<Vec<_>>()));
    if do_cz {
        let tol = sc.check.cz_tol.unwrap_or(1e-12);
        let count: usize = ok.iter().map(|r| r.cz_instances).sum();
        let rec = max(&ok.iter().map(|r| r.cz_reconstruction).collect::<Vec<_>>()).max(0.0);
        let mean = max(&ok.iter().map(|r| r.cz_mean_defect).collect::<Vec<_>>()).max(0.0);
        summary.push("cz_reconstruction", errors == 0 && rec <= tol, rec, format!("<= {tol:e}"));
        summary.push("cz_mean_zero", errors == 0 && mean <= tol, mean, format!("<= {tol:e}"));
        summary.record("cz_instances", count as f64);
    }
    if !sigmas.is_empty() {
        let tol = sc.check.telescope_tol.unwrap_or(1e-10);
        let worst = max(&ok.iter().map(|r| r.telescope).collect::<Vec<_>>()).max(0.0);
        summary.push("telescoping", errors == 0 && worst <= tol, worst, format!("<= {tol:e}"));
    }
    Ok(summary)
}

fn sparse(sc: &Scenario, out: &Path) -> Result<Summary, CliError> {
    let space = space_of(sc)?;
    let fam = build::family(sc.operator.as_ref().expect("validated"), &space)?;
    let funcs = sc.functions.as_ref().expect("validated");
    let ex = sc.exponents.expect("validated");
    let tr = sc.truncation.expect("validated");
    let mut cfg = StoppingConfig::new(&space, fam.c_o(), ex.p1, ex.p2);
    cfg.zeta_min = sc.check.zeta_min;
    let mut sigmas = vec![tr.sigma];
    for &s in sc.check.trend_sigmas.iter().flatten() {
        if s >= tr.tau {
            return Err(CliError::Config(format!("trend sigma {s} is not below tau = {}", tr.tau)));
        }
        if !sigmas.contains(&s) {
            sigmas.push(s);
        }
    }
    let maximal = sc.kind == Kind::SparseMaximal;
    let per_seed = (0..sc.seeds)
        .into_par_iter()
        .map(|i| {
            let (f1, f2, b0, _) = build::functions(&space, funcs, sc.seed, i, (ex.p1, ex.p2))?;
            sigmas
                .iter()
                .map(|&sigma| {
                    let case = SparseCase { scenario: sc.name.clone(), seed: i as u64, sigma, tau: tr.tau };
                    let v = if maximal {
                        verify_sparse_maximal(fam.as_ref(), &b0, &case, &f1, &f2, &cfg)
                    } else {
                        verify_sparse_linear(fam.as_ref(), &b0, &case, &f1, &f2, &cfg)
                    };
                    soft(v.map_err(CliError::from))
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let all: Vec<Result<SparseVerdict, String>> = per_seed.into_iter().flatten().collect();
    let verdicts: Vec<SparseVerdict> = all.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let errors = all.len() - verdicts.len();
    write_verdicts(&verdicts, File::create(out.join("verdicts.csv"))?)?;

    let mut summary = Summary::default();
    summary.push("verdicts", errors == 0, errors as f64, "0 failing instances");
    let ratios: Vec<f64> = verdicts.iter().map(|v| v.ratio).collect();
    let finite = ratios.iter().all(|r| r.is_finite());
    summary.push("ratios_finite", finite && errors == 0, max(&ratios), "finite");
    let batch = summarize(&verdicts);
    let limit = sc.check.max_spread.unwrap_or(20.0);
    summary.push("spread", batch.spread < limit, batch.spread, format!("max/median < {limit}"));
    for &sigma in &sigmas {
        let r: Vec<f64> = verdicts.iter().filter(|v| v.sigma == sigma).map(|v| v.ratio).collect();
        summary.record(format!("max_ratio_sigma_{sigma}"), max(&r));
        summary.record(format!("median_ratio_sigma_{sigma}"), median(&r));
    }
    if sigmas.len() > 1 {
        let x: Vec<f64> = verdicts.iter().map(|v| ((v.tau - v.sigma) as f64).log2()).collect();
        let fit = fit_line(&x, &ratios);
        let p = fit.map(|f| f.p_positive_slope()).unwrap_or(f64::NAN);
        let threshold = sc.check.trend_p.unwrap_or(0.05);
        summary.push("no_growth_trend", p > threshold, p, format!("one-sided p for slope > 0 exceeds {threshold}"));
        summary.record("trend_slope", fit.map(|f| f.slope).unwrap_or(f64::NAN));
    }
    Ok(summary)
}
