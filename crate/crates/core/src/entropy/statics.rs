//! Static (single-step) entropies of materialized partitions.

use crate::error::{Error, Result};
use crate::measure::ShiftMeasure;
use crate::partition::PartitionOfUnity;
use crate::symbolic::{same_system, LocallyConstantFunction};

/// `−t log t`, with `η(0) = 0`.
pub fn eta(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -t * t.ln()
    }
}

/// `t log t`, with `0 log 0 = 0`.
pub fn t_log_t(t: f64) -> f64 {
    -eta(t)
}

fn check_system(mu: &ShiftMeasure, phi: &PartitionOfUnity) -> Result<()> {
    if same_system(mu.system(), phi.system()) {
        Ok(())
    } else {
        Err(Error::SystemMismatch)
    }
}

/// `H̃_μ(Φ) = Σ_φ −μ(φ) log μ(φ) + μ(φ log φ)`.
pub fn static_metric_entropy(mu: &ShiftMeasure, phi: &PartitionOfUnity) -> Result<f64> {
    check_system(mu, phi)?;
    let weights = mu.weights(phi.depth());
    Ok(weighted_entropy(&weights, phi.members().iter().map(|m| m.values())))
}

fn weighted_entropy<'a>(weights: &[f64], members: impl Iterator<Item = &'a [f64]>) -> f64 {
    members
        .map(|values| {
            let mass: f64 = weights.iter().zip(values).map(|(w, v)| w * v).sum();
            let inner: f64 = weights.iter().zip(values).map(|(w, &v)| w * t_log_t(v)).sum();
            eta(mass) + inner
        })
        .sum()
}

/// `H̃_μ(Φ|Ψ) = Σ_ψ μ(ψ) H̃_{μ_ψ}(Φ)`, with terms of zero mass dropped.
pub fn conditional_static_entropy(
    mu: &ShiftMeasure,
    phi: &PartitionOfUnity,
    psi: &PartitionOfUnity,
) -> Result<f64> {
    check_system(mu, phi)?;
    check_system(mu, psi)?;
    let depth = phi.depth().max(psi.depth());
    let weights = mu.weights(depth);
    let phis = phi.values_at_depth(depth)?;
    let psis = psi.values_at_depth(depth)?;
    let mut total = 0.0;
    for condition in &psis {
        let mass: f64 = weights.iter().zip(condition).map(|(w, v)| w * v).sum();
        if mass <= 0.0 {
            continue;
        }
        let conditioned: Vec<f64> = weights
            .iter()
            .zip(condition)
            .map(|(w, v)| w * v / mass)
            .collect();
        total += mass * weighted_entropy(&conditioned, phis.iter().map(|v| v.as_slice()));
    }
    Ok(total)
}

/// `H̃(Φ) = Σ_φ sup φ`.
pub fn static_topological_entropy(phi: &PartitionOfUnity) -> f64 {
    phi.members().iter().map(|m| m.max()).sum()
}

/// `H̃(Φ|ψ) = Σ_φ sup_{supp ψ} φ`.
pub fn conditional_static_topological(
    phi: &PartitionOfUnity,
    psi: &LocallyConstantFunction,
) -> Result<f64> {
    if !same_system(phi.system(), psi.system()) {
        return Err(Error::SystemMismatch);
    }
    let depth = phi.depth().max(psi.depth());
    let support = psi.refine_to_depth(depth)?;
    let support = support.values();
    if support.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument("conditioning function vanishes".into()));
    }
    Ok(phi
        .values_at_depth(depth)?
        .iter()
        .map(|values| {
            values
                .iter()
                .zip(support)
                .filter(|(_, &s)| s > 0.0)
                .map(|(&v, _)| v)
                .fold(0.0, f64::max)
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{make_cylinder_partition, make_smoothed_partition};
    use crate::symbolic::SubshiftSystem;
    use std::sync::Arc;

    fn setup() -> (Arc<SubshiftSystem>, ShiftMeasure) {
        let s = Arc::new(SubshiftSystem::full_shift(2).unwrap());
        let mu = ShiftMeasure::bernoulli(s.clone(), vec![0.5, 0.5]).unwrap();
        (s, mu)
    }

    #[test]
    fn static_examples() {
        let (s, mu) = setup();
        let one = PartitionOfUnity::trivial(s.clone());
        assert_eq!(static_metric_entropy(&mu, &one).unwrap(), 0.0);
        assert_eq!(static_topological_entropy(&one), 1.0);

        let half = LocallyConstantFunction::constant(s.clone(), 0.5).unwrap();
        let halves = PartitionOfUnity::new(vec![half.clone(), half]).unwrap();
        assert!(static_metric_entropy(&mu, &halves).unwrap().abs() < 1e-15);

        let cyl = make_cylinder_partition(s.clone(), 1).unwrap();
        let h = static_metric_entropy(&mu, &cyl).unwrap();
        assert!((h - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn conditional_examples() {
        let (s, mu) = setup();
        let one = PartitionOfUnity::trivial(s.clone());
        let sm = make_smoothed_partition(s.clone(), 2, 0.3).unwrap();
        let plain = static_metric_entropy(&mu, &sm).unwrap();
        let given_one = conditional_static_entropy(&mu, &sm, &one).unwrap();
        assert!((plain - given_one).abs() < 1e-15);
        assert!(conditional_static_entropy(&mu, &one, &sm).unwrap().abs() < 1e-15);
    }

    #[test]
    fn indicator_self_conditioning_vanishes() {
        let (s, mu) = setup();
        let cyl = make_cylinder_partition(s.clone(), 2).unwrap();
        assert_eq!(conditional_static_entropy(&mu, &cyl, &cyl).unwrap(), 0.0);
        let scaled = cyl.scale_copies(3).unwrap();
        assert!(conditional_static_entropy(&mu, &scaled, &scaled).unwrap().abs() < 1e-15);
    }

    #[test]
    fn conditional_topological_restricts_to_support() {
        let (s, _) = setup();
        let cyl = make_cylinder_partition(s.clone(), 1).unwrap();
        let psi = cyl.members()[0].clone();
        assert_eq!(conditional_static_topological(&cyl, &psi).unwrap(), 1.0);
        let half = LocallyConstantFunction::constant(s, 0.5).unwrap();
        assert_eq!(conditional_static_topological(&cyl, &half).unwrap(), 2.0);
    }
}
