use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{invalid, Result};
use crate::function::GridFunction;
use crate::seeding;
use crate::space::{Ball, HomogeneousSpace};

/// Test-function generators used by the harness and the scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    /// Indicator of the host ball.
    Indicator,
    /// Indicator plus one tall spike at a random point.
    Spike,
    /// Sum of a few random cone bumps, nonnegative.
    RandomSmooth,
    /// Uniform complex noise of modulus at most one.
    Random,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 4] = [Self::Indicator, Self::Spike, Self::RandomSmooth, Self::Random];
}

/// Height added at the spike point.
pub const SPIKE_HEIGHT: f64 = 1e4;

/// Function of the given kind supported in `host`.
pub fn generate(space: &HomogeneousSpace, kind: FunctionKind, host: &Ball, seed: u64) -> Result<GridFunction> {
    if host.is_empty() {
        return invalid("host ball is empty");
    }
    let mut rng = seeding::stream(seed, 0x9e0);
    let n = space.len();
    let members = host.members();
    Ok(match kind {
        FunctionKind::Indicator => GridFunction::indicator(n, members),
        FunctionKind::Spike => {
            let mut f = GridFunction::indicator(n, members);
            let p = members[rng.random_range(0..members.len())];
            f.set(p, Complex64::new(1.0 + SPIKE_HEIGHT, 0.0));
            f
        }
        FunctionKind::RandomSmooth => {
            let mut v = vec![0.0; n];
            for _ in 0..rng.random_range(2..=5) {
                let c = members[rng.random_range(0..members.len())];
                let r = host.radius() * rng.random_range(0.1..0.6);
                let a = rng.random_range(0.5..2.0);
                for x in space.members_within(c, r) {
                    if host.contains(x) {
                        v[x] += a * (1.0 - space.dist(x, c) / r);
                    }
                }
            }
            GridFunction::from_real(v)
        }
        FunctionKind::Random => {
            let mut f = GridFunction::zeros(n);
            for &i in members {
                let (m, th): (f64, f64) = (rng.random(), rng.random_range(0.0..std::f64::consts::TAU));
                f.set(i, Complex64::from_polar(m, th));
            }
            f
        }
    })
}

/// Union of `blobs` random balls whose doubles stay inside the extent, with
/// scales between two steps above the singleton scale and a quarter of the
/// diameter. Never empty.
pub fn random_open_set(space: &HomogeneousSpace, blobs: usize, seed: u64) -> Vec<bool> {
    let mut rng = seeding::stream(seed, 0x9e1);
    let lo = space.singleton_scale() + 2;
    let hi = ((space.diameter() / 4.0).log2().floor() as i32).max(lo);
    let mut set = vec![false; space.len()];
    let mut placed = 0;
    for _ in 0..64 * blobs.max(1) {
        if placed == blobs.max(1) {
            break;
        }
        let c = rng.random_range(0..space.len());
        let s = rng.random_range(lo..=hi);
        if space.escapes_extent(c, 2.0 * 2f64.powi(s)) {
            continue;
        }
        for &x in space.ball(c, s).members() {
            set[x] = true;
        }
        placed += 1;
    }
    if placed == 0 {
        for &x in space.ball(space.origin(), lo).members() {
            set[x] = true;
        }
    }
    set
}
