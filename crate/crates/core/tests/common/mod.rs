#![allow(dead_code)]

use std::sync::Arc;

use pue_core::{LocallyConstantFunction, PartitionOfUnity, ShiftMeasure, SubshiftSystem};
use rand::Rng;

pub fn full2() -> Arc<SubshiftSystem> {
    Arc::new(SubshiftSystem::full_shift(2).unwrap())
}

pub fn golden() -> Arc<SubshiftSystem> {
    Arc::new(SubshiftSystem::golden_mean())
}

/// Fair coin, a biased coin and an asymmetric Markov chain on the full 2-shift.
pub fn three_measures(system: &Arc<SubshiftSystem>) -> Vec<ShiftMeasure> {
    vec![
        ShiftMeasure::bernoulli(system.clone(), vec![0.5, 0.5]).unwrap(),
        ShiftMeasure::bernoulli(system.clone(), vec![0.3, 0.7]).unwrap(),
        ShiftMeasure::markov(system.clone(), vec![vec![0.8, 0.2], vec![0.4, 0.6]], None).unwrap(),
    ]
}

/// `(1−λ)·𝟙_C + λ·r_C` over depth-`depth` cylinders `C`, where at each word the
/// weights `r_C` form a random probability vector.
pub fn random_smoothed(system: &Arc<SubshiftSystem>, depth: usize, lambda: f64, rng: &mut impl Rng) -> PartitionOfUnity {
    let r = system.words(depth).len();
    let mut values = vec![vec![0.0; r]; r];
    for w in 0..r {
        let raw: Vec<f64> = (0..r).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        for c in 0..r {
            let own = if c == w { 1.0 - lambda } else { 0.0 };
            values[c][w] = own + lambda * raw[c] / total;
        }
    }
    // Force the column sums to be exactly one.
    for w in 0..r {
        let rest: f64 = (1..r).map(|c| values[c][w]).sum();
        values[0][w] = (1.0 - rest).max(0.0);
    }
    PartitionOfUnity::from_values(system.clone(), depth, values).unwrap()
}

pub fn random_function(system: &Arc<SubshiftSystem>, depth: usize, rng: &mut impl Rng) -> LocallyConstantFunction {
    let n = system.words(depth).len();
    LocallyConstantFunction::new(system.clone(), depth, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Maximum of `c·a` over vertices of `{lower ≤ a ≤ upper, Σ a = 1}`.
pub fn lp_by_vertices(c: &[f64], lower: &[f64], upper: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut best: Option<f64> = None;
    for free in 0..n {
        for mask in 0u32..(1 << (n - 1)) {
            let mut a = vec![0.0; n];
            let mut bit = 0;
            for i in (0..n).filter(|&i| i != free) {
                a[i] = if mask >> bit & 1 == 1 { upper[i] } else { lower[i] };
                bit += 1;
            }
            a[free] = 1.0 - a.iter().sum::<f64>();
            if a[free] >= lower[free] - 1e-12 && a[free] <= upper[free] + 1e-12 {
                let v: f64 = c.iter().zip(&a).map(|(x, y)| x * y).sum();
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    }
    best
}

pub fn tables(p: &PartitionOfUnity, depth: usize) -> Vec<Vec<f64>> {
    p.values_at_depth(depth).unwrap()
}

/// Multiset equality of value tables up to `tol`, by greedy matching.
pub fn tables_close(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let hit = b.iter().enumerate().position(|(j, y)| {
            !used[j] && x.len() == y.len() && x.iter().zip(y).all(|(u, v)| (u - v).abs() <= tol)
        });
        hit.map(|j| used[j] = true).is_some()
    })
}
