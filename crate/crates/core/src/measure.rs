//! Shift-invariant Bernoulli and Markov measures and conditional measures.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symbolic::{same_system, LocallyConstantFunction, SubshiftSystem, Symbol, Word};

const STOCHASTIC_TOLERANCE: f64 = 1e-12;
const STATIONARY_TOLERANCE: f64 = 1e-14;
const MAX_POWER_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    Bernoulli { p: Vec<f64> },
    Markov { transition: Vec<Vec<f64>>, stationary: Vec<f64> },
}

/// An invariant Markov measure (Bernoulli measures are the rank-one case).
#[derive(Debug, Clone)]
pub struct ShiftMeasure {
    system: Arc<SubshiftSystem>,
    kind: MeasureKind,
    initial: Vec<f64>,
    transition: Vec<f64>,
}

impl ShiftMeasure {
    pub fn bernoulli(system: Arc<SubshiftSystem>, p: Vec<f64>) -> Result<Self> {
        let n = system.alphabet_size();
        check_probability_vector(&p, n, "probability vector")?;
        for i in 0..n {
            for j in 0..n {
                if p[i] > 0.0 && p[j] > 0.0 && !system.allows(i, j) {
                    return Err(Error::InvalidMeasure(format!(
                        "Bernoulli weights charge the forbidden word {i}{j}"
                    )));
                }
            }
        }
        let transition = (0..n).flat_map(|_| p.iter().copied()).collect();
        Ok(Self {
            system,
            kind: MeasureKind::Bernoulli { p: p.clone() },
            initial: p,
            transition,
        })
    }

    /// Markov measure from a stochastic matrix. The stationary vector is
    /// computed when absent and verified when given.
    pub fn markov(
        system: Arc<SubshiftSystem>,
        transition: Vec<Vec<f64>>,
        stationary: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = system.alphabet_size();
        if transition.len() != n {
            return Err(Error::InvalidMeasure(format!(
                "transition matrix has {} rows, alphabet has {n} symbols",
                transition.len()
            )));
        }
        for (i, row) in transition.iter().enumerate() {
            check_probability_vector(row, n, &format!("transition row {i}"))?;
            for (j, &pij) in row.iter().enumerate() {
                if pij > 0.0 && !system.allows(i, j) {
                    return Err(Error::InvalidMeasure(format!(
                        "transition {i}->{j} has weight {pij} but is forbidden"
                    )));
                }
            }
        }
        let stationary = match stationary {
            Some(pi) => {
                check_probability_vector(&pi, n, "stationary vector")?;
                let residual = stationary_residual(&transition, &pi);
                if residual > STOCHASTIC_TOLERANCE {
                    return Err(Error::InvalidMeasure(format!(
                        "given vector is not stationary (residual {residual:e})"
                    )));
                }
                pi
            }
            None => stationary_vector(&transition)?,
        };
        Ok(Self {
            system,
            initial: stationary.clone(),
            transition: transition.concat(),
            kind: MeasureKind::Markov {
                transition,
                stationary,
            },
        })
    }

    /// Product measure on the product system, with pair `(a, b)` encoded as
    /// `a * |B| + b`.
    pub fn product(&self, other: &ShiftMeasure, system: Arc<SubshiftSystem>) -> Result<Self> {
        let (na, nb) = (self.system.alphabet_size(), other.system.alphabet_size());
        if system.alphabet_size() != na * nb {
            return Err(Error::SystemMismatch);
        }
        let n = na * nb;
        let mut transition = vec![vec![0.0; n]; n];
        let mut stationary = vec![0.0; n];
        for a in 0..na {
            for b in 0..nb {
                stationary[a * nb + b] = self.initial[a] * other.initial[b];
                for a2 in 0..na {
                    for b2 in 0..nb {
                        transition[a * nb + b][a2 * nb + b2] =
                            self.transition_prob(a, a2) * other.transition_prob(b, b2);
                    }
                }
            }
        }
        Self::markov(system, transition, Some(stationary))
    }

    pub fn system(&self) -> &Arc<SubshiftSystem> {
        &self.system
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Distribution of the first symbol.
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn transition_prob(&self, from: usize, to: usize) -> f64 {
        self.transition[from * self.system.alphabet_size() + to]
    }

    /// Kolmogorov-Sinai entropy `−Σ π_i P_ij log P_ij`.
    pub fn entropy_rate(&self) -> f64 {
        let n = self.system.alphabet_size();
        (0..n)
            .map(|i| {
                let row: f64 = (0..n).map(|j| crate::entropy::eta(self.transition_prob(i, j))).sum();
                self.initial[i] * row
            })
            .sum()
    }

    /// `μ([w])`; inadmissible words have empty cylinders and weight 0.
    pub fn cylinder_weight(&self, word: &Word) -> f64 {
        self.weight(word.symbols())
    }

    pub fn weight(&self, word: &[Symbol]) -> f64 {
        let n = self.system.alphabet_size();
        if word.is_empty() || word.iter().any(|&s| s as usize >= n) || !self.system.is_admissible(word) {
            return 0.0;
        }
        word.windows(2).fold(self.initial[word[0] as usize], |acc, p| {
            acc * self.transition_prob(p[0] as usize, p[1] as usize)
        })
    }

    /// Cylinder weights of all admissible depth-`depth` words, in table order.
    pub fn weights(&self, depth: usize) -> Vec<f64> {
        self.system.words(depth).iter().map(|w| self.weight(w)).collect()
    }

    /// `μ(f) = Σ_w μ([w]) f(w)`.
    pub fn integrate(&self, f: &LocallyConstantFunction) -> Result<f64> {
        if !same_system(&self.system, f.system()) {
            return Err(Error::SystemMismatch);
        }
        Ok(self
            .weights(f.depth())
            .iter()
            .zip(f.values())
            .map(|(w, v)| w * v)
            .sum())
    }

    /// `μ_ψ = μ(· ψ) / μ(ψ)`.
    pub fn conditional(&self, condition: &LocallyConstantFunction) -> Result<ConditionalMeasure> {
        let mass = self.integrate(condition)?;
        if mass <= 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(ConditionalMeasure {
            base: self.clone(),
            condition: condition.clone(),
            mass,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ConditionalMeasure {
    base: ShiftMeasure,
    condition: LocallyConstantFunction,
    mass: f64,
}

impl ConditionalMeasure {
    pub fn base(&self) -> &ShiftMeasure {
        &self.base
    }

    pub fn condition(&self) -> &LocallyConstantFunction {
        &self.condition
    }

    /// `μ(ψ)`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn integrate(&self, f: &LocallyConstantFunction) -> Result<f64> {
        Ok(self.base.integrate(&f.mul(&self.condition)?)? / self.mass)
    }
}

fn check_probability_vector(p: &[f64], n: usize, what: &str) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidMeasure(format!(
            "{what} has {} entries, alphabet has {n} symbols",
            p.len()
        )));
    }
    if let Some(bad) = p.iter().find(|&&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::InvalidMeasure(format!("{what} has entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
        return Err(Error::InvalidMeasure(format!("{what} sums to {total}")));
    }
    Ok(())
}

fn step(transition: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|j| (0..n).map(|i| v[i] * transition[i][j]).sum())
        .collect()
}

fn stationary_residual(transition: &[Vec<f64>], pi: &[f64]) -> f64 {
    step(transition, pi)
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Power iteration on the lazy chain `(P + I) / 2`, which has the same
/// stationary vectors as `P` and no periodic part.
fn stationary_vector(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = transition.len();
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..MAX_POWER_ITERATIONS {
        let moved = step(transition, &v);
        let mut next: Vec<f64> = moved.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let change = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if change < STATIONARY_TOLERANCE && stationary_residual(transition, &v) < STATIONARY_TOLERANCE * 10.0 {
            return Ok(v);
        }
    }
    Err(Error::InvalidMeasure("stationary vector did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full2() -> Arc<SubshiftSystem> {
        Arc::new(SubshiftSystem::full_shift(2).unwrap())
    }

    fn golden_markov() -> ShiftMeasure {
        let s = Arc::new(SubshiftSystem::golden_mean());
        ShiftMeasure::markov(s, vec![vec![0.5, 0.5], vec![1.0, 0.0]], None).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn cylinder_weight_examples() {
        let mu = ShiftMeasure::bernoulli(full2(), vec![0.5, 0.5]).unwrap();
        assert_eq!(mu.cylinder_weight(&w("010")), 0.125);

        let m = golden_markov();
        match m.kind() {
            MeasureKind::Markov { stationary, .. } => {
                assert!((stationary[0] - 2.0 / 3.0).abs() < 1e-13);
                assert!((stationary[1] - 1.0 / 3.0).abs() < 1e-13);
            }
            _ => unreachable!(),
        }
        assert!((m.cylinder_weight(&w("01")) - 1.0 / 3.0).abs() < 1e-13);
        assert_eq!(m.cylinder_weight(&w("11")), 0.0);
    }

    #[test]
    fn entropy_rate_examples() {
        let mu = ShiftMeasure::bernoulli(full2(), vec![0.5, 0.5]).unwrap();
        assert!((mu.entropy_rate() - 2f64.ln()).abs() < 1e-15);
        assert!((golden_markov().entropy_rate() - 2f64.ln() * 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn integrate_examples() {
        let s = full2();
        let mu = ShiftMeasure::bernoulli(s.clone(), vec![0.5, 0.5]).unwrap();
        let one = LocallyConstantFunction::constant(s.clone(), 1.0).unwrap();
        assert_eq!(mu.integrate(&one).unwrap(), 1.0);
        let ind0 = LocallyConstantFunction::cylinder_indicator(s.clone(), &w("0")).unwrap();
        assert_eq!(mu.integrate(&ind0).unwrap(), 0.5);

        let m = golden_markov();
        let ind1 = LocallyConstantFunction::cylinder_indicator(m.system().clone(), &w("1")).unwrap();
        assert!((m.integrate(&ind1).unwrap() - 1.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn conditional_examples() {
        let s = full2();
        let mu = ShiftMeasure::bernoulli(s.clone(), vec![0.5, 0.5]).unwrap();
        let f = LocallyConstantFunction::cylinder_indicator(s.clone(), &w("01")).unwrap();

        let one = LocallyConstantFunction::constant(s.clone(), 1.0).unwrap();
        let c1 = mu.conditional(&one).unwrap();
        assert_eq!(c1.integrate(&f).unwrap(), mu.integrate(&f).unwrap());

        let ind0 = LocallyConstantFunction::cylinder_indicator(s.clone(), &w("0")).unwrap();
        assert_eq!(mu.conditional(&ind0).unwrap().integrate(&f).unwrap(), 0.5);

        let half = LocallyConstantFunction::constant(s.clone(), 0.5).unwrap();
        let ch = mu.conditional(&half).unwrap();
        assert!((ch.integrate(&f).unwrap() - 0.25).abs() < 1e-15);
        assert!((ch.integrate(&one).unwrap() - 1.0).abs() < 1e-15);

        let zero = LocallyConstantFunction::constant(s, 0.0).unwrap();
        assert_eq!(mu.conditional(&zero).unwrap_err(), Error::ZeroMass);
    }

    #[test]
    fn invalid_measures_are_rejected() {
        let g = Arc::new(SubshiftSystem::golden_mean());
        assert!(ShiftMeasure::bernoulli(g.clone(), vec![0.5, 0.5]).is_err());
        assert!(ShiftMeasure::bernoulli(full2(), vec![0.5, 0.6]).is_err());
        assert!(ShiftMeasure::markov(g.clone(), vec![vec![0.5, 0.5], vec![0.5, 0.5]], None).is_err());
        assert!(ShiftMeasure::markov(
            g.clone(),
            vec![vec![0.5, 0.5], vec![1.0, 0.0]],
            Some(vec![0.5, 0.5])
        )
        .is_err());
        assert!(ShiftMeasure::markov(
            g,
            vec![vec![0.5, 0.5], vec![1.0, 0.0]],
            Some(vec![2.0 / 3.0, 1.0 / 3.0])
        )
        .is_ok());
    }

    #[test]
    fn periodic_chain_has_uniform_stationary_vector() {
        let s = full2();
        let m = ShiftMeasure::markov(s, vec![vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap();
        assert!((m.initial()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn product_measure_weights_multiply() {
        let s = full2();
        let a = ShiftMeasure::bernoulli(s.clone(), vec![0.3, 0.7]).unwrap();
        let g = Arc::new(SubshiftSystem::golden_mean());
        let b = ShiftMeasure::markov(g.clone(), vec![vec![0.5, 0.5], vec![1.0, 0.0]], None).unwrap();
        let ps = Arc::new(s.product(&g).unwrap());
        let p = a.product(&b, ps).unwrap();
        // pairs (0,0) then (1,1): x = 01, y = 01
        let word = [0 as Symbol, 3];
        let expected = a.weight(&[0, 1]) * b.weight(&[0, 1]);
        assert!((p.weight(&word) - expected).abs() < 1e-15);
    }
}
