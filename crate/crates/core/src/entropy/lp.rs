//! Linear maximization over a box intersected with the probability simplex.

use crate::error::{Error, Result};

const FEASIBILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxSimplexSolution {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Maximizes `Σ c_i a_i` subject to `lower ≤ a ≤ upper` and `Σ a = 1`.
///
/// Starts from `lower` and pours the remaining mass into coordinates in
/// decreasing order of `c` (ties by index), each up to its upper bound.
pub fn box_simplex_maximize(c: &[f64], lower: &[f64], upper: &[f64]) -> Result<BoxSimplexSolution> {
    let n = c.len();
    if lower.len() != n || upper.len() != n {
        return Err(Error::InvalidArgument("objective and bounds differ in length".into()));
    }
    if let Some(i) = (0..n).find(|&i| lower[i] > upper[i]) {
        return Err(Error::Infeasible(format!(
            "lower bound {} exceeds upper bound {} at {i}",
            lower[i], upper[i]
        )));
    }
    let low: f64 = lower.iter().sum();
    let high: f64 = upper.iter().sum();
    let slack = FEASIBILITY_TOLERANCE * (n.max(1) as f64);
    if low > 1.0 + slack || high < 1.0 - slack {
        return Err(Error::Infeasible(format!(
            "bounds sum to [{low}, {high}], which excludes 1"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| c[j].total_cmp(&c[i]));
    let mut point = lower.to_vec();
    let mut remaining = 1.0 - low;
    for &i in &order {
        if remaining <= 0.0 {
            break;
        }
        let room = upper[i] - lower[i];
        let add = room.min(remaining);
        point[i] += add;
        remaining -= add;
    }
    let value = c.iter().zip(&point).map(|(ci, ai)| ci * ai).sum();
    Ok(BoxSimplexSolution { point, value })
}
