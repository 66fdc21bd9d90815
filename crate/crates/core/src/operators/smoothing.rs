use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use super::family::{pow2_ceil, Family, SingleScaleFamily};
use crate::covering::{partition_of_unity, scale_cover, PartitionOfUnity};
use crate::function::GridFunction;
use crate::space::HomogeneousSpace;

/// Support dilate of the smoothing bumps.
pub const SMOOTHING_C2: f64 = 2.0;

struct Level {
    pou: PartitionOfUnity,
    /// `|B(c_τ, 2^s)|`.
    volumes: Vec<f64>,
}

/// `A(s)f(x) = Σ_τ ψ_τ(x) |B(c_τ, 2^s)|⁻¹ ∫ f ψ_τ`, built from a fixed-scale
/// cover of the whole space. Positive and self-adjoint.
pub struct SmoothingFamily {
    space: Arc<HomogeneousSpace>,
    scales: RangeInclusive<i32>,
    levels: Mutex<HashMap<i32, Arc<Level>>>,
}

impl std::fmt::Debug for SmoothingFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothingFamily").field("scales", &self.scales).finish()
    }
}

impl SmoothingFamily {
    pub fn new(space: Arc<HomogeneousSpace>, scales: RangeInclusive<i32>) -> Self {
        Self { space, scales, levels: Mutex::new(HashMap::new()) }
    }

    fn level(&self, s: i32) -> Arc<Level> {
        if let Some(l) = self.levels.lock().expect("smoothing cache").get(&s) {
            return l.clone();
        }
        let cover = scale_cover(&self.space, s);
        let pou = partition_of_unity(&self.space, &cover.balls, s, SMOOTHING_C2)
            .expect("a cover of the whole space reaches every point");
        let volumes = cover.balls.iter().map(|b| b.measure()).collect();
        let level = Arc::new(Level { pou, volumes });
        self.levels.lock().expect("smoothing cache").entry(s).or_insert(level).clone()
    }
}

impl SingleScaleFamily for SmoothingFamily {
    fn space(&self) -> &Arc<HomogeneousSpace> {
        &self.space
    }
    fn scales(&self) -> RangeInclusive<i32> {
        self.scales.clone()
    }
    fn apply(&self, s: i32, f: &GridFunction) -> GridFunction {
        let mut out = GridFunction::zeros(f.len());
        if !self.scales.contains(&s) {
            return out;
        }
        let level = self.level(s);
        let w = self.space.weights();
        for (psi, vol) in level.pou.psi.iter().zip(&level.volumes) {
            let integral: Complex64 = psi.iter().map(|&(x, v)| f.get(x) * v * w[x]).sum();
            if integral == Complex64::new(0.0, 0.0) {
                continue;
            }
            let a = integral / vol;
            for &(x, v) in psi {
                let cur = out.get(x);
                out.set(x, cur + a * v);
            }
        }
        out
    }
    fn c_o(&self) -> f64 {
        let c = self.space.c_d();
        pow2_ceil(c * (1.0 + 2.0 * c * SMOOTHING_C2))
    }
    fn describe(&self) -> String {
        "smoothing".into()
    }
    fn adjoint(&self) -> Family {
        Arc::new(Self::new(self.space.clone(), self.scales.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_space, GridSpec};

    #[test]
    fn constant_and_point_mass() {
        let s = Arc::new(build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![128.0])).unwrap());
        let fam = SmoothingFamily::new(s.clone(), 0..=5);
        let one = fam.apply(3, &GridFunction::constant(s.len(), 1.0));
        let interior: Vec<f64> = (32..s.len() - 32).map(|i| one.get(i).re).collect();
        let (lo, hi) = (interior.iter().copied().fold(f64::INFINITY, f64::min), crate::stats::max(&interior));
        // Comparable to 1: the ratio of cover spacing to |B(c_τ, 2^s)| sets the level.
        assert!(lo > 0.1 && hi < 3.0 && hi / lo < 2.0, "{lo} {hi}");

        let o = s.origin();
        let spike = fam.apply(3, &GridFunction::indicator(s.len(), &[o]));
        assert!(spike.get(o).re > 0.0);
        assert_eq!(spike.get(o + 40).re, 0.0);
        assert!(spike.values().iter().all(|v| v.re >= 0.0));
    }
}
