//! Piecewise-linear expanding maps of the circle `[0, 1)` with sampled
//! partitions of unity and quadrature-based entropy estimates.
//!
//! A [`SampledFunction`] is the periodic piecewise-linear interpolant of its
//! samples on the uniform grid `x_g = g / G`. Error bars are Lipschitz bounds
//! on quadrature and grid-sup errors; they are bounds, not certificates.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::eta;
use crate::error::{Error, Result};
use crate::partition::{DEFAULT_BUDGET, PARTITION_TOLERANCE};

pub const DEFAULT_GRID: usize = 1 << 16;
const DENSITY_TOLERANCE: f64 = 1e-10;
const MARKOV_TOLERANCE: f64 = 1e-9;
const DENSITY_ITERATIONS: usize = 1_000_000;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalMapKind {
    Doubling,
    Pwl,
}

/// A piecewise-linear Markov map with its piecewise-constant invariant density.
///
/// On piece `[b_i, b_{i+1})` the map is `s_i (x − b_i)` for `s_i > 0` and
/// `1 + s_i (x − b_i)` for `s_i < 0`, read mod 1.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSystem {
    kind: IntervalMapKind,
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    density: Vec<f64>,
}

impl IntervalSystem {
    pub fn doubling() -> Self {
        let mut s = Self::piecewise_linear(vec![0.0, 0.5, 1.0], vec![2.0, 2.0]).expect("doubling map is valid");
        s.kind = IntervalMapKind::Doubling;
        s
    }

    pub fn piecewise_linear(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let pieces = breakpoints.len().saturating_sub(1);
        if pieces == 0 || slopes.len() != pieces {
            return Err(Error::InvalidSystem(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                pieces,
                slopes.len()
            )));
        }
        if breakpoints[0] != 0.0 || breakpoints[pieces] != 1.0 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSystem("breakpoints must increase strictly from 0 to 1".into()));
        }
        let mut images = Vec::with_capacity(pieces);
        for (i, &s) in slopes.iter().enumerate() {
            if !s.is_finite() || s.abs() <= 1.0 {
                return Err(Error::InvalidSystem(format!("slope {s} on piece {i} is not expanding")));
            }
            let reach = s.abs() * (breakpoints[i + 1] - breakpoints[i]);
            if reach > 1.0 + MARKOV_TOLERANCE {
                return Err(Error::InvalidSystem(format!("piece {i} overflows [0, 1]")));
            }
            let (lo, hi) = if s > 0.0 { (0.0, reach.min(1.0)) } else { ((1.0 - reach).max(0.0), 1.0) };
            let endpoint = if s > 0.0 { hi } else { lo };
            if !breakpoints.iter().any(|b| (b - endpoint).abs() <= MARKOV_TOLERANCE) {
                return Err(Error::InvalidSystem(format!("image of piece {i} does not end at a breakpoint")));
            }
            images.push((lo, hi));
        }
        let cover: Vec<Vec<bool>> = images
            .iter()
            .map(|&(lo, hi)| {
                (0..pieces)
                    .map(|j| lo <= breakpoints[j] + MARKOV_TOLERANCE && breakpoints[j + 1] <= hi + MARKOV_TOLERANCE)
                    .collect()
            })
            .collect();
        if (0..pieces).any(|j| cover.iter().all(|row| !row[j])) {
            return Err(Error::InvalidSystem("map is not onto [0, 1]".into()));
        }
        let density = invariant_density(&breakpoints, &slopes, &cover)?;
        Ok(Self { kind: IntervalMapKind::Pwl, breakpoints, slopes, density })
    }

    pub fn kind(&self) -> IntervalMapKind {
        self.kind
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Density value on each piece.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    fn piece(&self, x: f64) -> usize {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        i.clamp(1, self.slopes.len()) - 1
    }

    pub fn apply(&self, x: f64) -> f64 {
        let i = self.piece(x);
        let s = self.slopes[i];
        let y = s * (x - self.breakpoints[i]);
        let y = if s > 0.0 { y } else { 1.0 + y };
        if y >= 1.0 {
            y - 1.0
        } else if y < 0.0 {
            y + 1.0
        } else {
            y
        }
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.density[self.piece(x)]
    }

    /// Largest `|T'|`.
    pub fn expansion(&self) -> f64 {
        self.slopes.iter().fold(0.0f64, |a, s| a.max(s.abs()))
    }

    fn density_jumps(&self) -> f64 {
        let inner: f64 = self.density.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        inner + (self.density[0] - self.density[self.density.len() - 1]).abs()
    }
}

/// Fixed point of the transfer operator on densities constant on each piece.
fn invariant_density(breakpoints: &[f64], slopes: &[f64], cover: &[Vec<bool>]) -> Result<Vec<f64>> {
    let pieces = slopes.len();
    let lengths: Vec<f64> = breakpoints.windows(2).map(|w| w[1] - w[0]).collect();
    let mut rho = vec![1.0; pieces];
    for _ in 0..DENSITY_ITERATIONS {
        let pushed: Vec<f64> = (0..pieces)
            .map(|j| (0..pieces).filter(|&i| cover[i][j]).map(|i| rho[i] / slopes[i].abs()).sum())
            .collect();
        let mut next: Vec<f64> = rho.iter().zip(&pushed).map(|(a, b)| 0.5 * (a + b)).collect();
        let mass: f64 = next.iter().zip(&lengths).map(|(r, l)| r * l).sum();
        if !(mass > 0.0) {
            return Err(Error::InvalidSystem("transfer operator loses all mass".into()));
        }
        next.iter_mut().for_each(|r| *r /= mass);
        let change = next.iter().zip(&rho).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        rho = next;
        if change < 1e-15 {
            let total: f64 = rho.iter().zip(&lengths).map(|(r, l)| r * l).sum();
            if (total - 1.0).abs() > DENSITY_TOLERANCE || rho.iter().any(|&r| r < 0.0) {
                return Err(Error::InvalidSystem("invariant density failed to normalize".into()));
            }
            return Ok(rho);
        }
    }
    Err(Error::NonConvergent("invariant density iteration".into()))
}

/// Samples on the uniform circle grid with a Lipschitz bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    samples: Vec<f64>,
    lipschitz: f64,
}

impl SampledFunction {
    pub fn new(samples: Vec<f64>, lipschitz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidFunction("no samples".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) || !(lipschitz >= 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidFunction("samples and Lipschitz bound must be finite".into()));
        }
        Ok(Self { samples, lipschitz })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn grid(&self) -> usize {
        self.samples.len()
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Value of the periodic interpolant at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let g = self.samples.len();
        let pos = x.rem_euclid(1.0) * g as f64;
        let i = pos.floor();
        let frac = pos - i;
        let i = (i as usize) % g;
        if frac == 0.0 {
            self.samples[i]
        } else {
            (1.0 - frac) * self.samples[i] + frac * self.samples[(i + 1) % g]
        }
    }

    /// Width of the closed support padded by one grid cell on each side.
    pub fn support_width(&self) -> f64 {
        let g = self.samples.len();
        let positive = self.samples.iter().filter(|&&v| v > 0.0).count();
        ((positive + 1).min(g)) as f64 / g as f64
    }
}

/// `m` circle-wrapped hat functions centred at `j / m` with half-width `1/m`.
pub fn hat_partition(m: usize, grid: usize) -> Result<Vec<SampledFunction>> {
    if m < 2 {
        return Err(Error::InvalidArgument("hat partitions need m >= 2".into()));
    }
    if !grid.is_power_of_two() || grid < 8 {
        return Err(Error::InvalidArgument(format!("grid {grid} must be a power of two, at least 8")));
    }
    if m > grid / 4 {
        return Err(Error::InvalidArgument(format!("m = {m} is under-resolved on a grid of {grid}")));
    }
    let mut members = vec![vec![0.0; grid]; m];
    for g in 0..grid {
        // x·m = j + r/G exactly, so both hat values are exact dyadics.
        let scaled = g * m;
        let j = scaled / grid;
        let r = scaled % grid;
        let right = r as f64 / grid as f64;
        members[j][g] = 1.0 - right;
        members[(j + 1) % m][g] += right;
    }
    members
        .into_iter()
        .map(|samples| SampledFunction::new(samples, m as f64))
        .collect()
}

/// Checks a sampled partition of unity at the grid points.
pub fn validate_sampled_partition(phi: &[SampledFunction]) -> Result<usize> {
    let first = phi.first().ok_or(Error::EmptyPartition)?;
    let grid = first.grid();
    if phi.iter().any(|f| f.grid() != grid) {
        return Err(Error::InvalidArgument("members are sampled on different grids".into()));
    }
    if phi.iter().flat_map(|f| f.samples()).any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::InvalidFunction("member values must lie in [0, 1]".into()));
    }
    let max_residual = (0..grid)
        .map(|g| (phi.iter().map(|f| f.samples[g]).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    if max_residual > PARTITION_TOLERANCE {
        return Err(Error::NotPartition { max_residual });
    }
    Ok(grid)
}

/// A value with a symmetric error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn lo(&self) -> f64 {
        self.value - self.error
    }

    pub fn hi(&self) -> f64 {
        self.value + self.error
    }

    pub fn scale(&self, c: f64) -> Estimate {
        Estimate { value: self.value * c, error: self.error * c.abs() }
    }

    /// True when the whole interval lies within `tolerance` of `target`.
    pub fn within(&self, target: f64, tolerance: f64) -> bool {
        self.lo() >= target - tolerance && self.hi() <= target + tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxOptions {
    pub budget: u64,
    /// Error bars above this are flagged.
    pub tolerance: Option<f64>,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, tolerance: None }
    }
}

/// `H̃_μ(Φ₀ⁿ⁻¹)` and `log H̃(Φ₀ⁿ⁻¹)` with error bars.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticEntropies {
    pub n: usize,
    pub metric: Estimate,
    pub topological: Estimate,
    /// Member tuples with positive sampled mass.
    pub tuples: usize,
    pub flagged: bool,
}

impl StaticEntropies {
    /// `H̃_μ ≤ log H̃`, allowing for both error bars.
    pub fn variational_inequality_holds(&self) -> bool {
        self.metric.lo() <= self.topological.hi() + 1e-9
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct TupleStats {
    mass: f64,
    max: f64,
    cells: usize,
}

/// Quadrature of the iterated join of `phi` against the invariant density.
pub fn approx_static_entropies(
    system: &IntervalSystem,
    phi: &[SampledFunction],
    n: usize,
    options: &ApproxOptions,
) -> Result<StaticEntropies> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let grid = validate_sampled_partition(phi)?;
    let base = phi.len() as u64;
    if (n as f64) * (base as f64).log2() >= 63.0 {
        return Err(Error::InvalidArgument(format!("{} members over {n} steps overflow tuple codes", phi.len())));
    }
    let h = 1.0 / grid as f64;
    let rho: Vec<f64> = (0..grid).map(|g| system.density_at(g as f64 * h)).collect();
    let normalizer: f64 = rho.iter().sum();
    let weights: Vec<f64> = rho.iter().map(|r| r / normalizer).collect();

    let budget = options.budget;
    let spent = std::sync::atomic::AtomicU64::new(0);
    let chunks: Vec<Vec<(u64, TupleStats)>> = (0..grid.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut local: HashMap<u64, TupleStats> = HashMap::new();
            let mut factors: Vec<Vec<(u64, f64)>> = vec![Vec::new(); n];
            let mut ops = 0u64;
            for g in c * CHUNK..((c + 1) * CHUNK).min(grid) {
                let mut x = g as f64 * h;
                for row in factors.iter_mut() {
                    row.clear();
                    row.extend(
                        phi.iter()
                            .enumerate()
                            .map(|(i, f)| (i as u64, f.eval(x)))
                            .filter(|&(_, v)| v > 0.0),
                    );
                    x = system.apply(x);
                }
                let count: u64 = factors.iter().map(|r| r.len() as u64).product();
                ops += count;
                enumerate_tuples(&factors, base, |code, p| {
                    let e = local.entry(code).or_default();
                    e.mass += weights[g] * p;
                    e.max = e.max.max(p);
                    e.cells += 1;
                });
            }
            let total = spent.fetch_add(ops, std::sync::atomic::Ordering::Relaxed) + ops;
            if total > budget {
                return Err(Error::BudgetExceeded { needed: total, budget });
            }
            let mut sorted: Vec<(u64, TupleStats)> = local.into_iter().collect();
            sorted.sort_unstable_by_key(|&(k, _)| k);
            Ok(sorted)
        })
        .collect::<Result<_>>()?;

    let mut tuples: HashMap<u64, TupleStats> = HashMap::new();
    for chunk in chunks {
        for (code, s) in chunk {
            let e = tuples.entry(code).or_default();
            e.mass += s.mass;
            e.max = e.max.max(s.max);
            e.cells += s.cells;
        }
    }
    let mut stats: Vec<(u64, TupleStats)> = tuples.into_iter().filter(|(_, s)| s.mass > 0.0).collect();
    stats.sort_unstable_by_key(|&(k, _)| k);

    let member_lipschitz = phi.iter().fold(0.0f64, |a, f| a.max(f.lipschitz()));
    let lambda = system.expansion();
    let tuple_lipschitz = member_lipschitz * (0..n).map(|t| lambda.powi(t as i32)).sum::<f64>();
    let rho_max = system.density().iter().fold(0.0f64, |a, &r| a.max(r)) / (normalizer * h);
    let jump_error = system.density_jumps() * h;

    let mut metric = 0.0;
    let mut metric_error = 0.0;
    let mut top_sum = 0.0;
    let mut top_error = 0.0;
    for (_, s) in &stats {
        metric += eta(s.mass);
        // Trapezoid error of a Lipschitz integrand is at most L h²/4 per cell.
        let mass_error = tuple_lipschitz * h / 4.0 * rho_max * (s.cells + 1) as f64 * h + jump_error;
        metric_error += eta_error(s.mass, mass_error);
        top_sum += s.max;
        top_error += tuple_lipschitz * h / 2.0;
    }

    // μ(Σ_τ Π log Π) = n μ(Σ_φ φ log φ) by invariance.
    let overlap = (0..grid)
        .map(|g| phi.iter().filter(|f| f.samples[g] > 0.0).count())
        .max()
        .unwrap_or(1);
    let self_information: f64 = (0..grid)
        .map(|g| weights[g] * phi.iter().map(|f| -eta(f.samples[g])).sum::<f64>())
        .sum();
    metric += n as f64 * self_information;
    metric_error += n as f64 * (2.0 * overlap as f64 * eta((member_lipschitz * h).min(0.5)) + jump_error);

    let topological = Estimate { value: top_sum.ln(), error: (1.0 + top_error / top_sum).ln() };
    let metric = Estimate { value: metric, error: metric_error };
    let flagged = options
        .tolerance
        .is_some_and(|tol| metric.error > tol || topological.error > tol);
    Ok(StaticEntropies { n, metric, topological, tuples: stats.len(), flagged })
}

/// Bound on `|η(a) − η(b)|` for `|a − b| ≤ e`.
fn eta_error(a: f64, e: f64) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    let global = if e <= 0.5 { eta(e) } else { std::f64::consts::E.recip() };
    if a - e > 0.0 {
        let slope = |t: f64| (1.0 + t.ln()).abs();
        global.min(e * slope(a - e).max(slope((a + e).min(1.0))))
    } else {
        global
    }
}

/// Visits every tuple with one nonzero factor per step, coded in base `base`.
fn enumerate_tuples(factors: &[Vec<(u64, f64)>], base: u64, mut visit: impl FnMut(u64, f64)) {
    if factors.iter().any(|r| r.is_empty()) {
        return;
    }
    let n = factors.len();
    let mut idx = vec![0usize; n];
    loop {
        let mut code = 0u64;
        let mut p = 1.0;
        for (t, row) in factors.iter().enumerate() {
            let (member, v) = row[idx[t]];
            code = code * base + member;
            p *= v;
        }
        if p > 0.0 {
            visit(code, p);
        }
        let mut t = n;
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            idx[t] += 1;
            if idx[t] < factors[t].len() {
                break;
            }
            idx[t] = 0;
        }
    }
}

/// Static entropies at `n = 1..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousTrace {
    pub levels: Vec<StaticEntropies>,
}

impl ContinuousTrace {
    /// `H̃_μ(Φ₀ⁿ⁻¹)/n` per level.
    pub fn metric_ratios(&self) -> Vec<Estimate> {
        self.levels.iter().map(|l| l.metric.scale(1.0 / l.n as f64)).collect()
    }

    /// `log H̃(Φ₀ⁿ⁻¹)/n` per level.
    pub fn topological_ratios(&self) -> Vec<Estimate> {
        self.levels.iter().map(|l| l.topological.scale(1.0 / l.n as f64)).collect()
    }

    /// `H̃_μ(Φ₀ⁿ⁻¹) − H̃_μ(Φ₀ⁿ⁻²)` for `n ≥ 2`, with added error bars.
    pub fn metric_differences(&self) -> Vec<Estimate> {
        self.levels
            .windows(2)
            .map(|w| Estimate {
                value: w[1].metric.value - w[0].metric.value,
                error: w[1].metric.error + w[0].metric.error,
            })
            .collect()
    }
}

pub fn approx_trace(
    system: &IntervalSystem,
    phi: &[SampledFunction],
    horizon: usize,
    options: &ApproxOptions,
) -> Result<ContinuousTrace> {
    let levels = (1..=horizon)
        .map(|n| approx_static_entropies(system, phi, n, options))
        .collect::<Result<_>>()?;
    Ok(ContinuousTrace { levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: usize = 1 << 12;

    #[test]
    fn hats_sum_to_one_exactly() {
        for m in [2, 3, 5, 8, 16] {
            let hats = hat_partition(m, G).unwrap();
            assert_eq!(hats.len(), m);
            for g in 0..G {
                assert_eq!(hats.iter().map(|f| f.samples()[g]).sum::<f64>(), 1.0);
            }
            if G % m == 0 {
                assert!(hats.iter().all(|f| f.max() == 1.0));
            }
            validate_sampled_partition(&hats).unwrap();
        }
    }

    #[test]
    fn hat_support_width() {
        for m in [2, 4, 8] {
            let hats = hat_partition(m, G).unwrap();
            assert!(hats.iter().all(|f| (f.support_width() - 2.0 / m as f64).abs() < 1e-15));
        }
    }

    #[test]
    fn hat_errors() {
        assert!(hat_partition(1, G).is_err());
        assert!(hat_partition(G / 4 + 1, G).is_err());
        assert!(hat_partition(G / 4, G).is_ok());
        assert!(hat_partition(4, 1000).is_err());
    }

    #[test]
    fn doubling_map_is_exact_on_the_grid() {
        let t = IntervalSystem::doubling();
        assert_eq!(t.density(), &[1.0, 1.0]);
        assert_eq!(t.apply(0.25), 0.5);
        assert_eq!(t.apply(0.75), 0.5);
        assert_eq!(t.apply(0.5), 0.0);
    }

    #[test]
    fn golden_map_density_is_invariant() {
        let a = (5f64.sqrt() - 1.0) / 2.0;
        let t = IntervalSystem::piecewise_linear(vec![0.0, a, 1.0], vec![1.0 / a, a / (1.0 - a)]).unwrap();
        let rho = t.density();
        let total = rho[0] * a + rho[1] * (1.0 - a);
        assert!((total - 1.0).abs() < 1e-10);
        assert!(rho[0] > rho[1]);
        // μ(T⁻¹[0, y]) = μ([0, y]) for y below the breakpoint.
        let y = 0.3;
        let pre = rho[0] * y * a + rho[1] * y * (1.0 - a) / a;
        assert!((pre - rho[0] * y).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_markov_maps() {
        assert!(IntervalSystem::piecewise_linear(vec![0.0, 0.5, 1.0], vec![2.0, 1.5]).is_err());
        assert!(IntervalSystem::piecewise_linear(vec![0.0, 0.5, 1.0], vec![2.0, 0.5]).is_err());
        assert!(IntervalSystem::piecewise_linear(vec![0.0, 0.5, 1.0], vec![2.0]).is_err());
        assert!(IntervalSystem::piecewise_linear(vec![0.0, 1.0 / 3.0, 1.0], vec![3.0, -1.5]).is_ok());
    }

    #[test]
    fn trivial_partition_has_zero_entropies() {
        let one = vec![SampledFunction::new(vec![1.0; G], 0.0).unwrap()];
        let e = approx_static_entropies(&IntervalSystem::doubling(), &one, 3, &ApproxOptions::default()).unwrap();
        assert_eq!(e.metric, Estimate { value: 0.0, error: 0.0 });
        assert_eq!(e.topological, Estimate { value: 0.0, error: 0.0 });
    }

    #[test]
    fn variational_inequality_with_bars() {
        let a = (5f64.sqrt() - 1.0) / 2.0;
        let golden = IntervalSystem::piecewise_linear(vec![0.0, a, 1.0], vec![1.0 / a, a / (1.0 - a)]).unwrap();
        for system in [IntervalSystem::doubling(), golden] {
            for m in [2, 3, 4] {
                let hats = hat_partition(m, G).unwrap();
                let trace = approx_trace(&system, &hats, 4, &ApproxOptions::default()).unwrap();
                assert!(trace.levels.iter().all(StaticEntropies::variational_inequality_holds));
            }
        }
    }

    #[test]
    fn doubling_growth_rate_is_log_two() {
        let hats = hat_partition(8, G).unwrap();
        let trace = approx_trace(&IntervalSystem::doubling(), &hats, 5, &ApproxOptions::default()).unwrap();
        let last = *trace.metric_differences().last().unwrap();
        assert!((last.value - 2f64.ln()).abs() < 0.01, "{last:?}");
    }

    #[test]
    fn budget_is_enforced() {
        let hats = hat_partition(4, G).unwrap();
        let options = ApproxOptions { budget: 100, tolerance: None };
        assert!(matches!(
            approx_static_entropies(&IntervalSystem::doubling(), &hats, 3, &options),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn large_error_bars_are_flagged() {
        let hats = hat_partition(8, G).unwrap();
        let options = ApproxOptions { budget: DEFAULT_BUDGET, tolerance: Some(1e-9) };
        let e = approx_static_entropies(&IntervalSystem::doubling(), &hats, 3, &options).unwrap();
        assert!(e.flagged);
    }
}
