//! Limit estimation for subadditive sequences and limsup readouts for
//! sequences without a subadditivity guarantee.

use serde::Serialize;

use crate::error::{Error, Result};

pub const SUBADDITIVITY_TOLERANCE: f64 = 1e-9;
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

/// `a_1, …, a_N` with `a_{n+m} ≤ a_n + a_m` checked at construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditiveTrace {
    values: Vec<f64>,
}

impl SubadditiveTrace {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty trace".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite trace value {bad}")));
        }
        let len = values.len();
        for n in 1..=len {
            for m in 1..=n.min(len - n) {
                let excess = values[n + m - 1] - values[n - 1] - values[m - 1];
                if excess > SUBADDITIVITY_TOLERANCE {
                    return Err(Error::NotSubadditive { n, m, excess });
                }
            }
        }
        Ok(Self { values })
    }

    /// `a_n` at index `n - 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn ratios(&self) -> Vec<f64> {
        ratios(&self.values)
    }

    pub fn running_inf(&self) -> Vec<f64> {
        running_inf(&self.ratios())
    }

    /// `a_n − a_{n−1}` with `a_0 = 0`.
    pub fn differences(&self) -> Vec<f64> {
        differences(&self.values)
    }

    pub fn estimate(&self) -> LimitEstimate {
        fekete(self)
    }

    /// `a_n + n·c`, still subadditive.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, a)| a + (i + 1) as f64 * c)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate {
    /// `min_n a_n / n`, an upper bound for the limit.
    pub inf_ratio: f64,
    pub last_ratio: f64,
    pub last_difference: f64,
    pub horizon: usize,
    pub converged: bool,
}

/// Fekete readout of a subadditive trace.
pub fn fekete(trace: &SubadditiveTrace) -> LimitEstimate {
    let r = trace.ratios();
    let d = trace.differences();
    let n = r.len();
    LimitEstimate {
        inf_ratio: r.iter().copied().fold(f64::INFINITY, f64::min),
        last_ratio: r[n - 1],
        last_difference: d[n - 1],
        horizon: n,
        converged: n >= 2 && (r[n - 1] - r[n - 2]).abs() < CONVERGENCE_TOLERANCE,
    }
}

/// Trace of `log H̃_n` for a limsup-defined quantity: no subadditivity is
/// assumed, so the estimate is the largest ratio over the last third of the
/// horizons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimsupEstimate {
    pub values: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Number of trailing horizons the limsup readout is taken over.
    pub window: usize,
    pub limsup: f64,
    pub min_ratio: f64,
}

impl LimsupEstimate {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty trace".into()));
        }
        let ratios = ratios(&values);
        let window = values.len().div_ceil(3);
        let limsup = ratios[ratios.len() - window..]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            values,
            ratios,
            window,
            limsup,
            min_ratio,
        })
    }

    pub fn differences(&self) -> Vec<f64> {
        differences(&self.values)
    }

    pub fn running_inf(&self) -> Vec<f64> {
        running_inf(&self.ratios)
    }
}

fn ratios(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, a)| a / (i + 1) as f64)
        .collect()
}

fn running_inf(ratios: &[f64]) -> Vec<f64> {
    ratios
        .iter()
        .scan(f64::INFINITY, |m, &r| {
            *m = m.min(r);
            Some(*m)
        })
        .collect()
}

fn differences(values: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    values
        .iter()
        .map(|&a| {
            let d = a - prev;
            prev = a;
            d
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_sequence_converges_at_two() {
        let t = SubadditiveTrace::new(vec![0.7, 1.4]).unwrap();
        let e = fekete(&t);
        assert_eq!(e.inf_ratio, 0.7);
        assert!(e.converged);
        assert!(!fekete(&SubadditiveTrace::new(vec![0.7]).unwrap()).converged);
    }

    #[test]
    fn fibonacci_logs_approach_golden_ratio() {
        let mut f = vec![1.0f64, 2.0];
        while f.len() < 41 {
            let next = f[f.len() - 1] + f[f.len() - 2];
            f.push(next);
        }
        // c(n) = F(n+2): 2, 3, 5, 8, …
        let values: Vec<f64> = f[1..].iter().map(|c| c.ln()).collect();
        let e = SubadditiveTrace::new(values).unwrap().estimate();
        let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(e.inf_ratio >= golden);
        assert!(e.inf_ratio - golden < 0.02);
        assert!((e.last_difference - golden).abs() < 1e-12);
    }

    #[test]
    fn affine_sequence_difference_is_exact() {
        let (c, h) = (0.3, 0.25);
        let values: Vec<f64> = (1..=10).map(|n| c + n as f64 * h).collect();
        let t = SubadditiveTrace::new(values).unwrap();
        for d in &t.differences()[1..] {
            assert!((d - h).abs() < 1e-15);
        }
    }

    #[test]
    fn superadditive_sequence_is_rejected() {
        let err = SubadditiveTrace::new(vec![1.0, 2.5]).unwrap_err();
        assert!(matches!(err, Error::NotSubadditive { n: 1, m: 1, .. }));
    }

    #[test]
    fn limsup_window_is_last_third() {
        let e = LimsupEstimate::new(vec![1.0, 1.0, 3.0, 4.0, 5.0, 6.0, 1.0]).unwrap();
        assert_eq!(e.window, 3);
        assert_eq!(e.limsup, 1.0);
        assert!((e.min_ratio - 1.0 / 7.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn running_inf_is_nonincreasing_and_bounds_limit(
            h in 0.0f64..2.0,
            c in 0.0f64..3.0,
            n in 2usize..30,
        ) {
            let values: Vec<f64> = (1..=n).map(|k| c + k as f64 * h).collect();
            let t = SubadditiveTrace::new(values).unwrap();
            let inf = t.running_inf();
            prop_assert!(inf.windows(2).all(|w| w[1] <= w[0]));
            prop_assert!(t.estimate().inf_ratio >= h - 1e-12);
        }
    }
}
