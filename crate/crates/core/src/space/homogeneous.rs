use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng as _;

use super::ball::{Ball, BallShape};
use super::dilation::DilationGroup;
use crate::error::{invalid, Error, Result};
use crate::seeding;

/// Default cap on grid sites; about 16.7 million.
pub const DEFAULT_SITE_BUDGET: usize = 1 << 24;

/// Above this many points the cloud quasi-triangle constant is sampled.
const EXHAUSTIVE_TRIPLES: usize = 120;
const SAMPLED_TRIPLES: usize = 200_000;
/// Safety factor applied to a sampled (not analytic) quasi-triangle constant.
const C_D_SAFETY: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Mode {
    Grid,
    Cloud,
}

/// Lattice metadata: sites `k ∈ Z^n` with `|k_j| ≤ half_j`, position `h·k`.
#[derive(Debug, Clone)]
pub struct GridMeta {
    pub dilations: DilationGroup<f64>,
    pub step: f64,
    pub half: Vec<i64>,
    pub shape: Vec<usize>,
    pub strides: Vec<usize>,
}

impl GridMeta {
    pub fn dim(&self) -> usize {
        self.half.len()
    }

    pub fn coords(&self, idx: usize) -> Vec<i64> {
        let mut rest = idx;
        let mut k = vec![0; self.dim()];
        for j in 0..self.dim() {
            let q = rest / self.strides[j];
            rest %= self.strides[j];
            k[j] = q as i64 - self.half[j];
        }
        k
    }

    pub fn index(&self, k: &[i64]) -> Option<usize> {
        let mut idx = 0;
        for j in 0..self.dim() {
            if k[j].abs() > self.half[j] {
                return None;
            }
            idx += (k[j] + self.half[j]) as usize * self.strides[j];
        }
        Some(idx)
    }

    pub fn position(&self, idx: usize) -> Vec<f64> {
        self.coords(idx).iter().map(|&k| k as f64 * self.step).collect()
    }

    /// ρ of the lattice vector `o`, i.e. of the point `h·o`.
    pub fn offset_rho(&self, o: &[i64]) -> f64 {
        let x: Vec<f64> = o.iter().map(|&k| k as f64 * self.step).collect();
        self.dilations.rho(&x)
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parameters of a regular anisotropic grid.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub exponents: Vec<f64>,
    pub step: f64,
    /// Half-width per axis; a single entry is broadcast to every axis.
    pub extent: Vec<f64>,
    pub site_budget: usize,
}

impl GridSpec {
    pub fn new(exponents: Vec<f64>, step: f64, extent: Vec<f64>) -> Self {
        Self { exponents, step, extent, site_budget: DEFAULT_SITE_BUDGET }
    }

    /// Number of sites this grid would allocate, without building anything.
    pub fn site_count(&self) -> Result<usize> {
        let half = self.half_counts()?;
        Ok(half.iter().map(|&n| 2 * n as usize + 1).product())
    }

    fn half_counts(&self) -> Result<Vec<i64>> {
        let n = self.exponents.len();
        if n == 0 {
            return invalid("grid dimension must be at least 1");
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return invalid("grid step must be positive");
        }
        let extent: Vec<f64> = match self.extent.len() {
            1 => vec![self.extent[0]; n],
            m if m == n => self.extent.clone(),
            m => return invalid(format!("extent has {m} entries for a {n}-dimensional grid")),
        };
        if extent.iter().any(|&e| !(e > self.step)) {
            return invalid("grid extent must exceed the step on every axis");
        }
        // Small tolerance so that extent = k·h keeps the site at k.
        Ok(extent.iter().map(|&e| ((e / self.step) * (1.0 + 1e-12)).floor() as i64).collect())
    }
}

/// Finite quasi-metric measure space: a grid with the ρ metric or a weighted cloud.
pub struct HomogeneousSpace {
    mode: Mode,
    grid: Option<GridMeta>,
    metric: Option<Vec<f64>>,
    weights: Vec<f64>,
    total: f64,
    c_d: f64,
    c_d_measured: f64,
    min_sep: f64,
    shapes: Mutex<HashMap<u64, Arc<BallShape>>>,
    sorted_offsets: OnceLock<Vec<(f64, usize)>>,
}

impl fmt::Debug for HomogeneousSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomogeneousSpace")
            .field("mode", &self.mode)
            .field("points", &self.len())
            .field("c_d", &self.c_d)
            .field("grid", &self.grid)
            .finish()
    }
}

impl Clone for HomogeneousSpace {
    fn clone(&self) -> Self {
        Self {
            mode: self.mode,
            grid: self.grid.clone(),
            metric: self.metric.clone(),
            weights: self.weights.clone(),
            total: self.total,
            c_d: self.c_d,
            c_d_measured: self.c_d_measured,
            min_sep: self.min_sep,
            shapes: Mutex::new(HashMap::new()),
            sorted_offsets: OnceLock::new(),
        }
    }
}

/// Regular grid with the ρ metric of `spec.exponents` and weight `h^n` per site.
pub fn build_grid_space(spec: &GridSpec) -> Result<HomogeneousSpace> {
    let half = spec.half_counts()?;
    let dilations = DilationGroup::new(spec.exponents.clone())?;
    let shape: Vec<usize> = half.iter().map(|&n| 2 * n as usize + 1).collect();
    let sites = shape.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m)).unwrap_or(usize::MAX);
    if sites > spec.site_budget {
        return Err(Error::Budget { sites, budget: spec.site_budget, megabytes: sites.saturating_mul(48) >> 20 });
    }
    let mut strides = vec![1usize; shape.len()];
    for j in (0..shape.len().saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * shape[j + 1];
    }
    let n = shape.len() as i32;
    let w = spec.step.powi(n);
    let grid = GridMeta { dilations, step: spec.step, half, shape, strides };
    let (c_d, c_d_measured) = match grid.dilations.analytic_quasi_constant() {
        Some(c) => (c, c),
        None => {
            let m = sample_grid_quasi_constant(&grid);
            (m.max(1.0) * C_D_SAFETY, m)
        }
    };
    let min_sep = (0..grid.dim())
        .map(|j| {
            let mut e = vec![0; grid.dim()];
            e[j] = 1;
            grid.offset_rho(&e)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(HomogeneousSpace {
        mode: Mode::Grid,
        weights: vec![w; sites],
        total: w * sites as f64,
        grid: Some(grid),
        metric: None,
        c_d,
        c_d_measured,
        min_sep,
        shapes: Mutex::new(HashMap::new()),
        sorted_offsets: OnceLock::new(),
    })
}

fn sample_grid_quasi_constant(grid: &GridMeta) -> f64 {
    let mut rng = seeding::stream(0x5eed, 1);
    let n = grid.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..20_000 {
        let a: Vec<i64> = (0..n).map(|j| rng.random_range(-grid.half[j]..=grid.half[j])).collect();
        let b: Vec<i64> = (0..n).map(|j| rng.random_range(-grid.half[j]..=grid.half[j])).collect();
        let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let denom = grid.offset_rho(&a) + grid.offset_rho(&b);
        if denom > 0.0 {
            worst = worst.max(grid.offset_rho(&sum) / denom);
        }
    }
    worst
}

/// Weighted point cloud from a dense distance table (row-major, `n × n`).
pub fn build_cloud_space(table: Vec<f64>, weights: Vec<f64>, declared_c_d: Option<f64>) -> Result<HomogeneousSpace> {
    let n = weights.len();
    if n == 0 {
        return invalid("cloud must contain at least one point");
    }
    if table.len() != n * n {
        return invalid(format!("metric table has {} entries, expected {}", table.len(), n * n));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return invalid(format!("weights must be positive and finite, found {w}"));
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..n {
        if table[i * n + i] != 0.0 {
            return invalid(format!("diagonal entry {i} is not zero"));
        }
        for j in i + 1..n {
            let (dij, dji) = (table[i * n + j], table[j * n + i]);
            if dij != dji {
                return Err(Error::Asymmetric { i, j, dij, dji });
            }
            if !dij.is_finite() || dij < 0.0 {
                return Err(Error::NonFinite(format!("distance ({i}, {j}) = {dij}")));
            }
            if dij == 0.0 {
                return Err(Error::Degenerate { i, j });
            }
            min_sep = min_sep.min(dij);
        }
    }
    let measured = cloud_quasi_constant(&table, n);
    let mut c_d = measured.max(1.0);
    if let Some(declared) = declared_c_d {
        if declared > c_d {
            c_d = declared;
        }
    }
    Ok(HomogeneousSpace {
        mode: Mode::Cloud,
        grid: None,
        metric: Some(table),
        total: weights.iter().sum(),
        weights,
        c_d,
        c_d_measured: measured,
        min_sep: if n == 1 { 1.0 } else { min_sep },
        shapes: Mutex::new(HashMap::new()),
        sorted_offsets: OnceLock::new(),
    })
}

/// `max d(i,j) / (d(i,k) + d(k,j))` over triples of distinct points, or a seeded
/// sample of them. Triples with `k ∈ {i, j}` always give 1 and are skipped.
fn cloud_quasi_constant(table: &[f64], n: usize) -> f64 {
    let ratio = |i: usize, j: usize, k: usize| {
        let denom = table[i * n + k] + table[k * n + j];
        if denom > 0.0 {
            table[i * n + j] / denom
        } else {
            0.0
        }
    };
    let mut worst: f64 = 0.0;
    if n <= EXHAUSTIVE_TRIPLES {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in (0..n).filter(|&k| k != i && k != j) {
                    worst = worst.max(ratio(i, j, k));
                }
            }
        }
    } else {
        let mut rng = seeding::stream(0x5eed, 2);
        for _ in 0..SAMPLED_TRIPLES {
            let (i, j, k) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            if i != j && k != i && k != j {
                worst = worst.max(ratio(i, j, k));
            }
        }
    }
    worst
}

/// Reads `i,j,d` rows and `i,w` rows into a cloud space. Pairs given once are
/// mirrored; pairs given twice must agree.
pub fn load_cloud_csv(metric_path: &Path, weights_path: &Path, declared_c_d: Option<f64>) -> Result<HomogeneousSpace> {
    #[derive(serde::Deserialize)]
    struct WeightRow {
        i: usize,
        w: f64,
    }
    #[derive(serde::Deserialize)]
    struct MetricRow {
        i: usize,
        j: usize,
        d: f64,
    }
    let mut weight_rows: Vec<WeightRow> = Vec::new();
    for row in csv::Reader::from_path(weights_path)?.deserialize() {
        weight_rows.push(row?);
    }
    let n = weight_rows.iter().map(|r| r.i + 1).max().unwrap_or(0);
    let mut weights = vec![f64::NAN; n];
    for r in &weight_rows {
        weights[r.i] = r.w;
    }
    if let Some(i) = weights.iter().position(|w| w.is_nan()) {
        return invalid(format!("weights file has no entry for point {i}"));
    }
    let mut table = vec![f64::NAN; n * n];
    for i in 0..n {
        table[i * n + i] = 0.0;
    }
    let mut given = vec![false; n * n];
    for row in csv::Reader::from_path(metric_path)?.deserialize() {
        let MetricRow { i, j, d } = row?;
        if i >= n || j >= n {
            return invalid(format!("metric row ({i}, {j}) references an unknown point"));
        }
        if i == j {
            if d != 0.0 {
                return invalid(format!("diagonal entry {i} is not zero"));
            }
            continue;
        }
        table[i * n + j] = d;
        given[i * n + j] = true;
        if !given[j * n + i] {
            table[j * n + i] = d;
        }
    }
    if let Some(p) = table.iter().position(|d| d.is_nan()) {
        return invalid(format!("metric table misses pair ({}, {})", p / n, p % n));
    }
    build_cloud_space(table, weights, declared_c_d)
}

impl HomogeneousSpace {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn grid(&self) -> Option<&GridMeta> {
        self.grid.as_ref()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total_measure(&self) -> f64 {
        self.total
    }

    /// Stored quasi-triangle constant (never below 1).
    pub fn c_d(&self) -> f64 {
        self.c_d
    }

    /// Raw measured constant before clamping and safety factors.
    pub fn c_d_measured(&self) -> f64 {
        self.c_d_measured
    }

    /// Smallest distance between distinct points.
    pub fn min_separation(&self) -> f64 {
        self.min_sep
    }

    /// Largest integer `s` for which every `B(x, 2^s)` is a singleton.
    pub fn singleton_scale(&self) -> i32 {
        self.min_sep.log2().floor() as i32
    }

    /// Smallest integer `s` for which `B(x, 2^s)` is the whole space for every `x`.
    pub fn top_scale(&self) -> i32 {
        (self.diameter().log2().floor() as i32) + 1
    }

    pub fn diameter(&self) -> f64 {
        match (&self.grid, &self.metric) {
            (Some(g), _) => {
                let corner: Vec<i64> = g.half.iter().map(|&n| 2 * n).collect();
                g.offset_rho(&corner).max(self.min_sep)
            }
            (_, Some(t)) => t.iter().copied().fold(self.min_sep, f64::max),
            _ => self.min_sep,
        }
    }

    /// Index of the grid origin, or point 0 for clouds.
    pub fn origin(&self) -> usize {
        match &self.grid {
            Some(g) => g.index(&vec![0; g.dim()]).unwrap_or(0),
            None => 0,
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match (&self.grid, &self.metric) {
            (Some(g), _) => {
                let (a, b) = (g.coords(i), g.coords(j));
                let o: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                g.offset_rho(&o)
            }
            (_, Some(t)) => t[i * self.len() + j],
            _ => 0.0,
        }
    }

    pub fn measure_of(&self, idx: &[usize]) -> f64 {
        idx.iter().map(|&i| self.weights[i]).sum()
    }

    pub fn ball(&self, center: usize, scale: i32) -> Ball {
        self.ball_scaled(center, scale, 1.0)
    }

    /// Ball `B(center, factor·2^scale)`.
    pub fn ball_scaled(&self, center: usize, scale: i32, factor: f64) -> Ball {
        let members = self.members_within(center, factor * 2f64.powi(scale));
        let measure = self.measure_of(&members);
        Ball::from_parts(center, scale, factor, members, measure)
    }

    /// Sorted indices `{j : d(center, j) < r}`.
    pub fn members_within(&self, center: usize, r: f64) -> Vec<usize> {
        match &self.grid {
            Some(g) => {
                let shape = self.shape(r);
                let c = g.coords(center);
                let dim = g.dim();
                let mut out = Vec::with_capacity(shape.count());
                for o in shape.offsets.chunks(dim) {
                    let mut idx = 0usize;
                    let mut inside = true;
                    for j in 0..dim {
                        let k = c[j] + o[j];
                        if k.abs() > g.half[j] {
                            inside = false;
                            break;
                        }
                        idx += (k + g.half[j]) as usize * g.strides[j];
                    }
                    if inside {
                        out.push(idx);
                    }
                }
                out
            }
            None => {
                let n = self.len();
                let t = self.metric.as_ref().expect("cloud metric");
                (0..n).filter(|&j| t[center * n + j] < r).collect()
            }
        }
    }

    /// True when the coordinate box of `B(center, r)` leaves the grid extent.
    pub fn escapes_extent(&self, center: usize, r: f64) -> bool {
        match &self.grid {
            Some(g) => {
                let c = g.coords(center);
                let reach = self.shape(r).reach.clone();
                (0..g.dim()).any(|j| c[j].abs() + reach[j] > g.half[j])
            }
            None => false,
        }
    }

    pub(crate) fn shape(&self, r: f64) -> Arc<BallShape> {
        let g = self.grid.as_ref().expect("ball shapes exist on grids only");
        let key = r.to_bits();
        if let Some(s) = self.shapes.lock().expect("shape cache").get(&key) {
            return s.clone();
        }
        let shape = Arc::new(BallShape::build(g, r));
        let mut cache = self.shapes.lock().expect("shape cache");
        if cache.len() > 4096 {
            cache.clear();
        }
        cache.entry(key).or_insert(shape).clone()
    }

    /// `dist(x, Ωᶜ)` for every `x ∈ Ω`; 0 off Ω and `+∞` when `Ωᶜ` is empty.
    pub fn dist_to_complement(&self, in_set: &[bool]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        if in_set.iter().all(|&b| b) {
            return vec![f64::INFINITY; n];
        }
        match &self.grid {
            Some(g) => {
                let sorted = self.sorted_offsets.get_or_init(|| sorted_lattice(g));
                let dim = g.dim();
                let total: usize = g.shape.iter().map(|&m| 2 * m - 1).product();
                let span: Vec<usize> = g.shape.iter().map(|&m| 2 * m - 1).collect();
                for x in 0..n {
                    if !in_set[x] {
                        continue;
                    }
                    let c = g.coords(x);
                    let mut best = f64::INFINITY;
                    'scan: for &(rho, code) in sorted {
                        let mut rest = code;
                        let mut idx = 0usize;
                        let mut block = total;
                        for j in 0..dim {
                            block /= span[j];
                            let q = (rest / block) as i64 - (g.shape[j] as i64 - 1);
                            rest %= block;
                            let k = c[j] + q;
                            if k.abs() > g.half[j] {
                                continue 'scan;
                            }
                            idx += (k + g.half[j]) as usize * g.strides[j];
                        }
                        if !in_set[idx] {
                            best = rho;
                            break;
                        }
                    }
                    out[x] = best;
                }
            }
            None => {
                let t = self.metric.as_ref().expect("cloud metric");
                for x in 0..n {
                    if in_set[x] {
                        out[x] = (0..n).filter(|&y| !in_set[y]).map(|y| t[x * n + y]).fold(f64::INFINITY, f64::min);
                    }
                }
            }
        }
        out
    }

    /// `Σ_{y ∈ B(x,r)} values[y]` for every center `x`.
    pub fn ball_sums(&self, r: f64, values: &[f64]) -> Vec<f64> {
        match &self.grid {
            Some(g) => super::scan::grid_ball_sums(g, &self.shape(r), values),
            None => self.cloud_reduce(r, values, 0.0, |a, b| a + b),
        }
    }

    /// `max_{y ∈ B(x,r)} values[y]` for every center `x`.
    pub fn ball_max(&self, r: f64, values: &[f64]) -> Vec<f64> {
        match &self.grid {
            Some(g) => super::scan::grid_ball_max(g, &self.shape(r), values),
            None => self.cloud_reduce(r, values, f64::NEG_INFINITY, f64::max),
        }
    }

    fn cloud_reduce(&self, r: f64, values: &[f64], init: f64, op: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let n = self.len();
        let t = self.metric.as_ref().expect("cloud metric");
        (0..n).map(|x| (0..n).filter(|&y| t[x * n + y] < r).fold(init, |acc, y| op(acc, values[y]))).collect()
    }
}

/// Every lattice difference vector encoded as a mixed-radix code, sorted by ρ.
fn sorted_lattice(g: &GridMeta) -> Vec<(f64, usize)> {
    let span: Vec<usize> = g.shape.iter().map(|&m| 2 * m - 1).collect();
    let total: usize = span.iter().product();
    let dim = g.dim();
    let mut out = Vec::with_capacity(total);
    let mut o = vec![0i64; dim];
    for code in 0..total {
        let mut rest = code;
        let mut block = total;
        for j in 0..dim {
            block /= span[j];
            o[j] = (rest / block) as i64 - (g.shape[j] as i64 - 1);
            rest %= block;
        }
        out.push((g.offset_rho(&o), code));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(half: f64) -> HomogeneousSpace {
        build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![half])).unwrap()
    }

    #[test]
    fn unit_ball_is_singleton() {
        let s = line(8.0);
        let b = s.ball(s.origin(), 0);
        assert_eq!(b.members(), &[s.origin()]);
        assert_eq!(b.measure(), 1.0);
        assert_eq!(s.c_d(), 1.0);
    }

    #[test]
    fn radius_four_ball_enumerates_seven_sites() {
        let s = line(8.0);
        let b = s.ball(s.origin(), 2);
        let coords: Vec<i64> = b.members().iter().map(|&i| s.grid().unwrap().coords(i)[0]).collect();
        assert_eq!(coords, (-3..=3).collect::<Vec<_>>());
        assert_eq!(b.measure(), 7.0);
    }

    #[test]
    fn equilateral_cloud_stores_one() {
        let t = vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let s = build_cloud_space(t, vec![1.0; 3], None).unwrap();
        assert!((s.c_d_measured() - 0.5).abs() < 1e-15);
        assert_eq!(s.c_d(), 1.0);
    }

    #[test]
    fn snowflake_cloud() {
        let r2 = 2f64.sqrt();
        let t = vec![0.0, 1.0, r2, 1.0, 0.0, 1.0, r2, 1.0, 0.0];
        let s = build_cloud_space(t, vec![1.0; 3], None).unwrap();
        // Exhaustive scan: the worst triple is (0, 2 | 1) with ratio √2 / 2.
        assert!((s.c_d_measured() - r2 / 2.0).abs() < 1e-15);
        assert_eq!(s.c_d(), 1.0);
    }

    #[test]
    fn single_point_cloud() {
        let s = build_cloud_space(vec![0.0], vec![2.5], None).unwrap();
        assert_eq!(s.total_measure(), 2.5);
        assert_eq!(s.ball(0, 0).members(), &[0]);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            build_cloud_space(vec![0.0, 1.0, 2.0, 0.0], vec![1.0; 2], None),
            Err(Error::Asymmetric { .. })
        ));
        assert!(matches!(
            build_cloud_space(vec![0.0, 0.0, 0.0, 0.0], vec![1.0; 2], None),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(build_grid_space(&GridSpec::new(vec![1.0], 0.0, vec![4.0])).is_err());
        assert!(build_grid_space(&GridSpec::new(vec![-1.0], 1.0, vec![4.0])).is_err());
        let mut big = GridSpec::new(vec![1.0, 1.0], 1.0, vec![1000.0]);
        big.site_budget = 1000;
        assert!(matches!(build_grid_space(&big), Err(Error::Budget { .. })));
    }

    #[test]
    fn anisotropic_ball_matches_level_set() {
        let s = build_grid_space(&GridSpec::new(vec![1.0, 2.0], 1.0, vec![20.0])).unwrap();
        let g = s.grid().unwrap();
        for scale in 0..3 {
            let r = 2f64.powi(scale);
            let b = s.ball(s.origin(), scale);
            let brute: Vec<usize> = (0..s.len()).filter(|&j| s.dist(s.origin(), j) < r).collect();
            assert_eq!(b.members(), brute.as_slice());
            for &m in b.members() {
                let k = g.coords(m);
                assert!((k[0] as f64).abs() < r && (k[1] as f64).abs() < r * r);
            }
        }
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let s = build_grid_space(&GridSpec::new(vec![1.0, 2.0], 1.0, vec![6.0])).unwrap();
        let in_set: Vec<bool> = (0..s.len()).map(|i| s.dist(s.origin(), i) < 4.5).collect();
        let d = s.dist_to_complement(&in_set);
        for x in 0..s.len() {
            let brute = if in_set[x] {
                (0..s.len()).filter(|&y| !in_set[y]).map(|y| s.dist(x, y)).fold(f64::INFINITY, f64::min)
            } else {
                0.0
            };
            assert_eq!(d[x], brute);
        }
    }
}
