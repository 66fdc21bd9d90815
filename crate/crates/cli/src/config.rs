//! Scenario files: strict TOML with named sections and no defaults for exponents.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sparsedom::operators::Angular;
use sparsedom::verify::FunctionKind;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Whitney,
    Ladder,
    Improving,
    Decay,
    SparseLinear,
    SparseMaximal,
    Sharpness,
    Weights,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::Whitney,
        Kind::Ladder,
        Kind::Improving,
        Kind::Decay,
        Kind::SparseLinear,
        Kind::SparseMaximal,
        Kind::Sharpness,
        Kind::Weights,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Whitney => "whitney",
            Kind::Ladder => "ladder",
            Kind::Improving => "improving",
            Kind::Decay => "decay",
            Kind::SparseLinear => "sparse-linear",
            Kind::SparseMaximal => "sparse-maximal",
            Kind::Sharpness => "sharpness",
            Kind::Weights => "weights",
        }
    }

    pub fn parse(name: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    #[serde(default)]
    pub description: String,
    pub seed: u64,
    /// Number of seeded instances for batch kinds.
    #[serde(default = "one")]
    pub seeds: usize,
    /// Declared wall-clock budget in seconds.
    pub time_budget_s: f64,
    /// Absent only for kinds that need no space (decay).
    pub space: Option<SpaceSection>,
    pub operator: Option<OperatorSection>,
    pub functions: Option<FunctionsSection>,
    pub exponents: Option<Exponents>,
    pub truncation: Option<Truncation>,
    #[serde(default)]
    pub check: CheckSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceMode {
    Grid,
    Cloud,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub mode: SpaceMode,
    pub exponents: Option<Vec<f64>>,
    pub step: Option<f64>,
    pub extent: Option<Vec<f64>>,
    pub site_budget: Option<usize>,
    pub metric: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub c_d: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Identity,
    Zero,
    Hilbert,
    Flat,
    Smoothing,
    Circle,
    RadonCurve,
    PointMass,
    MeasureFile,
    ParabolaArc,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    pub family: FamilyKind,
    /// Inclusive scale range `[lo, hi]`.
    pub scales: Option<[i32; 2]>,
    pub nodes: Option<usize>,
    pub degree: Option<usize>,
    pub angular: Option<Angular>,
    pub path: Option<PathBuf>,
    /// Declared localization constant, replacing the computed one.
    pub c_o: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Indicator,
    Spike,
    RandomSmooth,
    Random,
    Atom,
    File,
}

impl Generator {
    pub fn kind(self) -> Option<FunctionKind> {
        match self {
            Generator::Indicator => Some(FunctionKind::Indicator),
            Generator::Spike => Some(FunctionKind::Spike),
            Generator::RandomSmooth => Some(FunctionKind::RandomSmooth),
            Generator::Random => Some(FunctionKind::Random),
            Generator::Atom | Generator::File => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::Indicator => "indicator",
            Generator::Spike => "spike",
            Generator::RandomSmooth => "random-smooth",
            Generator::Random => "random",
            Generator::Atom => "atom",
            Generator::File => "file",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionsSection {
    /// Generators for `f1`, cycled over the seeds.
    pub f1: Vec<Generator>,
    pub f2: Vec<Generator>,
    /// Scale of the top ball `B0`, centered at the origin.
    pub host_scale: i32,
    pub f1_path: Option<PathBuf>,
    pub f2_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exponents {
    pub p1: f64,
    pub p2: f64,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub sigma: i32,
    pub tau: i32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayTarget {
    pub family: FamilyKind,
    pub nodes: Option<usize>,
    pub degree: Option<usize>,
    pub angular: Option<Angular>,
    pub dim: Option<usize>,
    pub path: Option<PathBuf>,
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    // whitney
    pub eta: Option<f64>,
    pub blobs: Option<usize>,
    // ladder
    /// Localization constant when no operator is given.
    pub c_o: Option<f64>,
    pub zeta_min: Option<f64>,
    pub min_depth: Option<usize>,
    pub cz: Option<bool>,
    pub cz_tol: Option<f64>,
    pub telescope_sigmas: Option<Vec<i32>>,
    pub telescope_tol: Option<f64>,
    // improving
    pub s: Option<i32>,
    pub trials: Option<usize>,
    pub atom_scales: Option<Vec<i32>>,
    pub refine: Option<bool>,
    pub refine_max: Option<f64>,
    pub converse: Option<bool>,
    pub converse_range: Option<[f64; 2]>,
    // decay
    pub measures: Option<Vec<DecayTarget>>,
    pub shells: Option<[i32; 2]>,
    pub directions: Option<usize>,
    pub radii: Option<usize>,
    // sparse
    pub trend_sigmas: Option<Vec<i32>>,
    pub max_spread: Option<f64>,
    pub trend_p: Option<f64>,
    // sharpness
    pub deltas: Option<Vec<f64>>,
    pub slope_tol: Option<f64>,
    // weights
    pub weight_exponents: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Sets `key = value` (dotted key) in a parsed document. The value is read as a
/// TOML value when possible and as a string otherwise.
pub fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| config_error(format!("override `{spec}` is not key=value")))?;
    let value = match format!("v = {}", raw.trim()).parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, path) = parts.split_last().expect("split yields one part");
    let mut table = doc;
    for p in path {
        let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table =
            entry.as_table_mut().ok_or_else(|| config_error(format!("override `{key}`: `{p}` is not a section")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

pub fn parse(text: &str, overrides: &[String]) -> Result<Scenario, CliError> {
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| config_error(e.to_string()))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let scenario: Scenario = doc.try_into().map_err(|e: toml::de::Error| config_error(e.to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.seeds == 0 {
            return Err(config_error("seeds must be at least 1"));
        }
        if !(self.time_budget_s > 0.0) {
            return Err(config_error("time_budget_s must be positive"));
        }
        if let Some(e) = &self.exponents {
            validate_exponents(e.p1, e.p2)?;
        }
        if let Some(t) = &self.truncation {
            if t.sigma >= t.tau {
                return Err(config_error(format!("truncation needs sigma < tau, got {} and {}", t.sigma, t.tau)));
            }
        }
        let need = |what: &str, present: bool| {
            if present {
                Ok(())
            } else {
                Err(config_error(format!("kind `{}` needs {what}", self.kind)))
            }
        };
        if self.kind != Kind::Decay {
            need("[space]", self.space.is_some())?;
        }
        match self.kind {
            Kind::Whitney => need("check.eta", self.check.eta.is_some()),
            Kind::Ladder => {
                need("[functions]", self.functions.is_some())?;
                need("[exponents]", self.exponents.is_some())?;
                need("[operator] or check.c_o", self.operator.is_some() || self.check.c_o.is_some())?;
                if self.check.telescope_sigmas.is_some() {
                    need("[operator] for the telescoping check", self.operator.is_some())?;
                }
                Ok(())
            }
            Kind::Improving => {
                need("[operator]", self.operator.is_some())?;
                need("[exponents]", self.exponents.is_some())?;
                need("check.s", self.check.s.is_some())?;
                if self.check.converse == Some(true) {
                    need(
                        "[functions] and [truncation] for the converse",
                        self.functions.is_some() && self.truncation.is_some(),
                    )?;
                }
                Ok(())
            }
            Kind::Decay => need("check.measures", self.check.measures.as_ref().is_some_and(|m| !m.is_empty())),
            Kind::SparseLinear | Kind::SparseMaximal => {
                need("[operator]", self.operator.is_some())?;
                need("[functions]", self.functions.is_some())?;
                need("[exponents]", self.exponents.is_some())?;
                need("[truncation]", self.truncation.is_some())
            }
            Kind::Sharpness => {
                need(
                    "[operator] with family = \"parabola-arc\"",
                    self.operator.as_ref().is_some_and(|o| o.family == FamilyKind::ParabolaArc),
                )?;
                need("check.deltas", self.check.deltas.is_some())
            }
            Kind::Weights => {
                need("[exponents] with p", self.exponents.is_some_and(|e| e.p.is_some()))?;
                need("check.weight_exponents", self.check.weight_exponents.is_some())
            }
        }
    }
}

/// `1 ≤ p1 ≤ p2′ ≤ ∞`, i.e. `p1, p2 ≥ 1` and `1/p1 + 1/p2 ≥ 1`.
pub fn validate_exponents(p1: f64, p2: f64) -> Result<(), CliError> {
    if !(p1 >= 1.0) || !(p2 >= 1.0) {
        return Err(config_error(format!("exponents need p1 ≥ 1 and p2 ≥ 1, got p1 = {p1}, p2 = {p2}")));
    }
    let dual = if p2 == 1.0 { f64::INFINITY } else { p2 / (p2 - 1.0) };
    if p1 > dual * (1.0 + 1e-12) {
        return Err(config_error(format!(
            "exponents violate 1 ≤ p1 ≤ p2′ ≤ ∞: p1 = {p1} exceeds p2′ = {dual} (need 1/p1 + 1/p2 ≥ 1)"
        )));
    }
    Ok(())
}

/// Required fields per kind, printed by `describe`.
pub fn describe(kind: Kind) -> &'static str {
    match kind {
        Kind::Whitney => {
            "whitney: Whitney covers of seeded random open subsets, checked for properties (i)-(vi).
  required: name, kind, seed, seeds, time_budget_s, [space], check.eta (> 5)
  optional: check.blobs (balls per random set, default 4)
  outputs:  instances.csv, cover.csv (first instance), summary.csv"
        }
        Kind::Ladder => {
            "ladder: stopping ladders for seeded (f1, f2) pairs, with certification, CZ and telescoping identities.
  required: name, kind, seed, seeds, time_budget_s, [space], [functions] (f1, f2, host_scale), [exponents] (p1, p2),
            [operator] or check.c_o
  optional: check.zeta_min (certify with this floor), check.min_depth, check.cz, check.cz_tol,
            check.telescope_sigmas with [operator], check.telescope_tol
  outputs:  ladders.csv, sparse.csv (first certified ladder), summary.csv"
        }
        Kind::Improving => {
            "improving: empirical improving constant, modulus table, refinement and converse checks.
  required: name, kind, seed, time_budget_s, [space], [operator], [exponents] (p1, p2), check.s
  optional: check.trials, check.atom_scales, check.refine, check.refine_max,
            check.converse with [functions] and [truncation], check.converse_range
  outputs:  improving.csv, modulus.csv, converse.csv, summary.csv"
        }
        Kind::Decay => {
            "decay: Fourier decay exponent of measures over dyadic frequency shells.
  required: name, kind, seed, time_budget_s, check.measures (family, nodes/degree/angular/dim/path, beta_min or beta_max)
  optional: check.shells, check.directions, check.radii
  outputs:  decay.csv, summary.csv"
        }
        Kind::SparseLinear | Kind::SparseMaximal => {
            "sparse-linear / sparse-maximal: ratio of the truncated (or maximal) pairing to the sparse form over seeds.
  required: name, kind, seed, seeds, time_budget_s, [space], [operator], [functions] (f1, f2, host_scale),
            [exponents] (p1, p2), [truncation] (sigma, tau)
  optional: check.zeta_min, check.max_spread, check.trend_sigmas, check.trend_p
  outputs:  verdicts.csv, summary.csv"
        }
        Kind::Sharpness => {
            "sharpness: value and super-level measure of T(0) applied to small balls, against an exact oracle at half step.
  required: name, kind, seed, time_budget_s, [space] (2D isotropic grid), [operator] family = \"parabola-arc\" with nodes,
            check.deltas
  optional: check.slope_tol
  outputs:  sharpness.csv, oracle.csv, summary.csv"
        }
        Kind::Weights => {
            "weights: A_p and reverse Hölder constants of power weights and a sampled weighted norm.
  required: name, kind, seed, time_budget_s, [space], [exponents] (p1, p2, p), check.weight_exponents
  optional: [operator] and [truncation] for the weighted norm sample, check.trials
  outputs:  weights.csv, summary.csv"
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
kind = "whitney"
seed = 1
time_budget_s = 5
[space]
mode = "grid"
exponents = [1.0]
step = 1.0
extent = [32.0]
[check]
eta = 8.0
"#;

    #[test]
    fn parses_and_overrides() {
        let s = parse(MINIMAL, &["seed=7".into(), "check.eta=6.5".into(), "output.dir=x".into()]).unwrap();
        assert_eq!(s.seed, 7);
        assert_eq!(s.check.eta, Some(6.5));
        assert_eq!(s.output.dir, Some(PathBuf::from("x")));
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = MINIMAL.replace("eta = 8.0", "eta = 8.0\nbogus = 1");
        assert!(matches!(parse(&text, &[]), Err(CliError::Config(_))));
        assert!(parse(MINIMAL, &["space.colour=1".into()]).is_err());
    }

    #[test]
    fn exponent_constraint_names_the_rule() {
        assert!(validate_exponents(1.0, 1.0).is_ok());
        assert!(validate_exponents(2.0, 2.0).is_ok());
        let err = validate_exponents(3.0, 2.0).unwrap_err().to_string();
        assert!(err.contains("p1 ≤ p2′"), "{err}");
        assert!(validate_exponents(0.5, 1.0).is_err());
    }
}
