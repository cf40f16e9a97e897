//! Fixtures shared by the criterion benchmarks.

use std::sync::Arc;

use pue_core::{make_cylinder_partition, make_smoothed_partition, PartitionOfUnity, ShiftMeasure, SubshiftSystem};

pub fn full_shift() -> Arc<SubshiftSystem> {
    Arc::new(SubshiftSystem::full_shift(2).expect("two symbols"))
}

pub fn golden_shift() -> Arc<SubshiftSystem> {
    Arc::new(SubshiftSystem::golden_mean())
}

pub fn skewed_markov(system: &Arc<SubshiftSystem>) -> ShiftMeasure {
    ShiftMeasure::markov(system.clone(), vec![vec![0.8, 0.2], vec![0.4, 0.6]], None).expect("stochastic")
}

pub fn smoothed(system: &Arc<SubshiftSystem>, depth: usize) -> PartitionOfUnity {
    make_smoothed_partition(system.clone(), depth, 0.25).expect("valid smoothing")
}

pub fn cylinders(system: &Arc<SubshiftSystem>, depth: usize) -> PartitionOfUnity {
    make_cylinder_partition(system.clone(), depth).expect("valid depth")
}

/// Deterministic LP instance of dimension `n` with a feasible box.
pub fn lp_instance(n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let c = (0..n).map(|i| ((i * 7919) % 101) as f64 / 101.0 - 0.5).collect();
    let lower = (0..n).map(|i| 0.5 / n as f64 * ((i % 3) as f64 / 3.0)).collect();
    let upper = (0..n).map(|i| (2.0 + (i % 5) as f64) / n as f64).collect();
    (c, lower, upper)
}
