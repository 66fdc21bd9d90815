use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use sparsedom::improving::make_atom;
use sparsedom::operators::{
    radon_curve_measure, CzFamily, CzKernel, DiscreteMeasure, Family, IdentityFamily, MeasureFamily, SmoothingFamily,
    ZeroFamily,
};
use sparsedom::space::{build_grid_space, load_cloud_csv, GridSpec};
use sparsedom::verify::{generate, parabola_arc};
use sparsedom::{Ball, GridFunction, HomogeneousSpace};

use crate::config::{DecayTarget, FamilyKind, FunctionsSection, Generator, OperatorSection, SpaceMode, SpaceSection};
use crate::CliError;

fn missing(what: &str) -> CliError {
    CliError::Config(format!("missing {what}"))
}

pub fn grid_spec(sec: &SpaceSection) -> Result<GridSpec, CliError> {
    let exponents = sec.exponents.clone().ok_or_else(|| missing("space.exponents"))?;
    let step = sec.step.ok_or_else(|| missing("space.step"))?;
    let extent = sec.extent.clone().ok_or_else(|| missing("space.extent"))?;
    let mut spec = GridSpec::new(exponents, step, extent);
    if let Some(b) = sec.site_budget {
        spec.site_budget = b;
    }
    Ok(spec)
}

pub fn space(sec: &SpaceSection) -> Result<Arc<HomogeneousSpace>, CliError> {
    let s = match sec.mode {
        SpaceMode::Grid => build_grid_space(&grid_spec(sec)?)?,
        SpaceMode::Cloud => {
            let metric = sec.metric.as_deref().ok_or_else(|| missing("space.metric"))?;
            let weights = sec.weights.as_deref().ok_or_else(|| missing("space.weights"))?;
            load_cloud_csv(metric, weights, sec.c_d)?
        }
    };
    Ok(Arc::new(s))
}

pub fn measure(
    family: FamilyKind,
    nodes: Option<usize>,
    degree: Option<usize>,
    angular: Option<sparsedom::operators::Angular>,
    dim: Option<usize>,
    path: Option<&Path>,
) -> Result<DiscreteMeasure, CliError> {
    let nodes = || nodes.ok_or_else(|| missing("nodes"));
    Ok(match family {
        FamilyKind::Circle => DiscreteMeasure::circle(nodes()?)?,
        FamilyKind::RadonCurve => radon_curve_measure(
            degree.ok_or_else(|| missing("degree"))?,
            angular.ok_or_else(|| missing("angular"))?,
            nodes()?,
        )?,
        FamilyKind::PointMass => DiscreteMeasure::point_mass(dim.ok_or_else(|| missing("dim"))?),
        FamilyKind::MeasureFile => DiscreteMeasure::from_csv(path.ok_or_else(|| missing("path"))?)?,
        FamilyKind::ParabolaArc => parabola_arc(nodes()?)?,
        other => return Err(CliError::Config(format!("{other:?} is not a measure"))),
    })
}

pub fn decay_measure(t: &DecayTarget) -> Result<DiscreteMeasure, CliError> {
    measure(t.family, t.nodes, t.degree, t.angular, t.dim, t.path.as_deref())
}

pub fn family(op: &OperatorSection, space: &Arc<HomogeneousSpace>) -> Result<Family, CliError> {
    let scales = op.scales.map(|[lo, hi]| lo..=hi);
    let need_scales = || scales.clone().ok_or_else(|| missing("operator.scales"));
    if op.c_o.is_some() && !is_measure(op.family) {
        return Err(CliError::Config("operator.c_o can only be declared for measure families".into()));
    }
    let fam: Family = match op.family {
        FamilyKind::Identity => Arc::new(IdentityFamily::new(space.clone(), need_scales()?)),
        FamilyKind::Zero => Arc::new(ZeroFamily::new(space.clone(), need_scales()?)),
        FamilyKind::Smoothing => Arc::new(SmoothingFamily::new(space.clone(), need_scales()?)),
        FamilyKind::Hilbert | FamilyKind::Flat => {
            let kernel = if op.family == FamilyKind::Hilbert { CzKernel::hilbert() } else { CzKernel::flat() };
            match scales {
                Some(r) => Arc::new(CzFamily::with_scales(space.clone(), kernel, r)?),
                None => Arc::new(CzFamily::new(space.clone(), kernel)?),
            }
        }
        kind => {
            let m = measure(kind, op.nodes, op.degree, op.angular, None, op.path.as_deref())?;
            let mut f = MeasureFamily::new(space.clone(), m, need_scales()?)?;
            if let Some(c) = op.c_o {
                f = f.with_declared_c_o(c);
            }
            Arc::new(f)
        }
    };
    Ok(fam)
}

fn is_measure(k: FamilyKind) -> bool {
    matches!(
        k,
        FamilyKind::Circle
            | FamilyKind::RadonCurve
            | FamilyKind::PointMass
            | FamilyKind::MeasureFile
            | FamilyKind::ParabolaArc
    )
}

/// Seed of instance `i`, function `which`, derived from the scenario seed.
pub fn instance_seed(base: u64, i: usize, which: u64) -> u64 {
    base.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(4 * i as u64 + which)
}

fn read_function(space: &HomogeneousSpace, path: &Path) -> Result<GridFunction, CliError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut values = Vec::with_capacity(space.len());
    for rec in rdr.records() {
        let rec = rec?;
        let num = |k: usize| -> Result<f64, CliError> {
            rec.get(k)
                .ok_or_else(|| CliError::Config(format!("{}: rows need columns re,im", path.display())))?
                .trim()
                .parse()
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        };
        values.push(Complex64::new(num(0)?, num(1)?));
    }
    if values.len() != space.len() {
        return Err(CliError::Config(format!(
            "{} has {} rows for {} points",
            path.display(),
            values.len(),
            space.len()
        )));
    }
    Ok(GridFunction::from_complex(values))
}

/// `(f1, f2, B0)` for instance `i`, cycling through the configured generators.
pub fn functions(
    space: &HomogeneousSpace,
    sec: &FunctionsSection,
    base_seed: u64,
    i: usize,
    p: (f64, f64),
) -> Result<(GridFunction, GridFunction, Ball, [Generator; 2]), CliError> {
    if sec.f1.is_empty() || sec.f2.is_empty() {
        return Err(CliError::Config("functions.f1 and functions.f2 need at least one generator".into()));
    }
    let b0 = space.ball(space.origin(), sec.host_scale);
    let g1 = sec.f1[i % sec.f1.len()];
    let g2 = sec.f2[i % sec.f2.len()];
    let make = |g: Generator, path: Option<&Path>, which: u64, p: f64| -> Result<GridFunction, CliError> {
        let seed = instance_seed(base_seed, i, which);
        match (g.kind(), g) {
            (Some(k), _) => Ok(generate(space, k, &b0, seed)?),
            (None, Generator::Atom) => Ok(make_atom(space, &b0, p, seed)?.values),
            _ => read_function(space, path.ok_or_else(|| missing("functions.f1_path / f2_path"))?),
        }
    };
    let f1 = make(g1, sec.f1_path.as_deref(), 1, p.0)?;
    let f2 = make(g2, sec.f2_path.as_deref(), 2, p.1)?;
    Ok((f1, f2, b0, [g1, g2]))
}
