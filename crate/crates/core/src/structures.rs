//! Candidates, upper semi-continuous envelopes and the transfinite sequence
//! on finite measure families.
//!
//! Every asymptotic quantifier is evaluated against a finite horizon `K` and
//! a finite grid of `γ` values, so a passing verdict is evidence at that
//! truncation and never a proof.
//!
//! A declared converging sequence is finite. Its last term stands for the
//! tail: the limsup of a function along the sequence is read at that term.
//! When the function itself depends on a step index `k` (as `u + θ_k` does),
//! a sequence of length `M` is read at step `min(M, k)`, so the last term of a
//! sequence shows the tail as seen at the step matching its position.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used for exact comparisons.
pub const EXACT_SLACK: f64 = 1e-12;

/// A declared sequence of points converging to `limit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergingSequence {
    pub terms: Vec<usize>,
    pub limit: usize,
}

/// Finite stand-in for a space of invariant measures: labelled points plus
/// declared converging sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologicalFamily {
    points: Vec<String>,
    sequences: Vec<ConvergingSequence>,
}

impl TopologicalFamily {
    pub fn new(points: Vec<String>, sequences: Vec<ConvergingSequence>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("family has no points".into()));
        }
        for (i, s) in sequences.iter().enumerate() {
            if s.terms.is_empty() {
                return Err(Error::InvalidArgument(format!("sequence {i} is empty")));
            }
            if s.limit >= points.len() || s.terms.iter().any(|&t| t >= points.len()) {
                return Err(Error::InvalidArgument(format!(
                    "sequence {i} references a point outside the family"
                )));
            }
        }
        Ok(Self { points, sequences })
    }

    /// A family with no nonconstant sequences.
    pub fn discrete(points: Vec<String>) -> Result<Self> {
        Self::new(points, Vec::new())
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn sequences(&self) -> &[ConvergingSequence] {
        &self.sequences
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() == self.points.len() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "function has {} values, family has {} points",
                f.len(),
                self.points.len()
            )))
        }
    }

    /// Limit in `k` of the envelopes of `fs[k-1]`, `k = 1..=K`, read at `K`
    /// with the step-indexed sequence semantics of this module.
    ///
    /// Computes `W(x, K)` where `W(y, k) = max(f_k(y), W(last(s), min(|s|, k)))`
    /// over sequences `s` converging to `y`.
    pub fn limit_envelope(&self, fs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let horizon = fs.len();
        if horizon == 0 {
            return Err(Error::InvalidArgument("empty function sequence".into()));
        }
        for f in fs {
            self.check_len(f)?;
        }
        let mut table: Vec<Vec<f64>> = fs.to_vec();
        // Max-propagation over (point, step) states; each pass can only raise
        // values, so it settles after at most |states| passes.
        loop {
            let mut changed = false;
            for k in 0..horizon {
                for s in &self.sequences {
                    let last = *s.terms.last().expect("validated nonempty");
                    let step = (s.terms.len() - 1).min(k);
                    let v = table[step][last];
                    if v > table[k][s.limit] {
                        table[k][s.limit] = v;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Ok(table.pop().expect("horizon is positive"))
    }

    /// `f̄(x) = max(f(x), limsup_{y→x} f(y))`.
    pub fn usc_envelope(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.limit_envelope(std::slice::from_ref(&f.to_vec()))
    }

    /// `f̄ − f`.
    pub fn defect(&self, f: &[f64]) -> Result<Vec<f64>> {
        let env = self.usc_envelope(f)?;
        Ok(env.iter().zip(f).map(|(e, v)| e - v).collect())
    }
}

/// Per-`γ` outcome of an almost-monotonicity or domination check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaVerdict {
    pub gamma: f64,
    /// Witness index `ℓ` for each `k` (0-based), or `None` when none exists
    /// within the horizon.
    pub witnesses: Vec<Option<usize>>,
    pub passed: bool,
}

/// Verdict over a `γ` grid at a fixed horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub horizon: usize,
    pub per_gamma: Vec<GammaVerdict>,
    pub passed: bool,
}

impl Verdict {
    fn from_gammas(horizon: usize, per_gamma: Vec<GammaVerdict>) -> Self {
        let passed = per_gamma.iter().all(|g| g.passed);
        Self { horizon, per_gamma, passed }
    }
}

/// Checks that for each `γ` and `k` some `ℓ` has `v_k ≤ v_j + γ` for every
/// `j ∈ [ℓ, K)`; the witness reported is the smallest such `ℓ`.
pub fn is_almost_increasing(values: &[f64], gammas: &[f64]) -> Verdict {
    let per_gamma = gammas
        .iter()
        .map(|&gamma| {
            let witnesses: Vec<Option<usize>> = values
                .iter()
                .map(|&vk| {
                    let mut witness = None;
                    for l in (0..values.len()).rev() {
                        if vk <= values[l] + gamma + EXACT_SLACK {
                            witness = Some(l);
                        } else {
                            break;
                        }
                    }
                    witness
                })
                .collect();
            let passed = witnesses.iter().all(Option::is_some);
            GammaVerdict { gamma, witnesses, passed }
        })
        .collect();
    Verdict::from_gammas(values.len(), per_gamma)
}

/// Mirror image of [`is_almost_increasing`].
pub fn is_almost_decreasing(values: &[f64], gammas: &[f64]) -> Verdict {
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    is_almost_increasing(&negated, gammas)
}

/// Per-`γ` check that the oscillation of the last `tail` values is at most `γ`.
pub fn certify_convergence(values: &[f64], gammas: &[f64], tail: usize) -> Vec<bool> {
    let start = values.len().saturating_sub(tail.max(1));
    let window = &values[start..];
    let oscillation = if window.is_empty() {
        0.0
    } else {
        let hi = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = window.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    };
    gammas.iter().map(|&g| oscillation <= g + EXACT_SLACK).collect()
}

/// A sequence `h_1..h_K` of per-point functions approximating the entropy
/// map `h`, with a declared pointwise convergence tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    values: Vec<Vec<f64>>,
    target: Vec<f64>,
    tolerance: f64,
}

impl Candidate {
    pub fn new(values: Vec<Vec<f64>>, target: Vec<f64>, tolerance: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("candidate has no functions".into()));
        }
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance {tolerance} is not a finite nonnegative number")));
        }
        let n = target.len();
        if values.iter().any(|h| h.len() != n) {
            return Err(Error::InvalidArgument("candidate functions differ in length from target".into()));
        }
        if values.iter().flatten().chain(&target).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("candidate values must be finite".into()));
        }
        Ok(Self { values, target, tolerance })
    }

    /// `h_1..h_K`, one vector per step.
    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn points(&self) -> usize {
        self.target.len()
    }

    /// `θ_k = h − h_k`.
    pub fn tails(&self) -> Vec<Vec<f64>> {
        self.values
            .iter()
            .map(|hk| self.target.iter().zip(hk).map(|(h, v)| h - v).collect())
            .collect()
    }

    /// The sequence `k ↦ h_k(x)` at one point.
    pub fn at_point(&self, x: usize) -> Vec<f64> {
        self.values.iter().map(|h| h[x]).collect()
    }

    /// Almost-increasing at every point.
    pub fn is_almost_increasing(&self, gammas: &[f64]) -> bool {
        (0..self.points()).all(|x| is_almost_increasing(&self.at_point(x), gammas).passed)
    }

    /// Errors unless `|h_K − h| ≤ tolerance` everywhere and every tail sequence
    /// is almost-decreasing at the tolerance.
    pub fn certify(&self) -> Result<()> {
        let tails = self.tails();
        let last = tails.last().expect("nonempty");
        let slack = self.tolerance + EXACT_SLACK;
        for (x, &t) in last.iter().enumerate() {
            if t.abs() > slack {
                return Err(Error::NonConvergent(format!(
                    "|h_K - h| = {:e} at point {x} exceeds tolerance {:e}",
                    t.abs(),
                    self.tolerance
                )));
            }
            let seq: Vec<f64> = tails.iter().map(|row| row[x]).collect();
            if !is_almost_decreasing(&seq, &[self.tolerance]).passed {
                return Err(Error::NonConvergent(format!(
                    "tails at point {x} are not almost-decreasing at tolerance {:e}",
                    self.tolerance
                )));
            }
        }
        Ok(())
    }

    fn check_family(&self, family: &TopologicalFamily) -> Result<()> {
        if family.len() == self.points() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "candidate has {} points, family has {}",
                self.points(),
                family.len()
            )))
        }
    }
}

/// Checks that `dominating` weakly-uniformly dominates `dominated`: for each
/// `γ` and `k` some `ℓ` has `h_k ≤ h'_ℓ + γ` at every point. The witness is
/// the smallest such `ℓ`.
pub fn weakly_dominates(dominated: &Candidate, dominating: &Candidate, gammas: &[f64]) -> Result<Verdict> {
    if dominated.points() != dominating.points() {
        return Err(Error::InvalidArgument("candidates live on different families".into()));
    }
    let per_gamma = gammas
        .iter()
        .map(|&gamma| {
            let witnesses: Vec<Option<usize>> = dominated
                .values()
                .iter()
                .map(|hk| {
                    dominating.values().iter().position(|hl| {
                        hk.iter().zip(hl).all(|(a, b)| *a <= b + gamma + EXACT_SLACK)
                    })
                })
                .collect();
            let passed = witnesses.iter().all(Option::is_some);
            GammaVerdict { gamma, witnesses, passed }
        })
        .collect();
    Ok(Verdict::from_gammas(dominated.horizon(), per_gamma))
}

/// Both directions of [`weakly_dominates`].
pub fn weakly_equivalent(first: &Candidate, second: &Candidate, gammas: &[f64]) -> Result<bool> {
    Ok(weakly_dominates(first, second, gammas)?.passed && weakly_dominates(second, first, gammas)?.passed)
}

/// `u_0, u_1, …` up to and including the first repeat.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransfiniteTrace {
    pub u: Vec<Vec<f64>>,
    /// Least `α` with `u_{α+1} = u_α`; `None` when `max_iter` ran out first.
    pub order_of_accumulation: Option<usize>,
}

impl TransfiniteTrace {
    /// The stabilized function `u_{α₀}` (the last one computed).
    pub fn limit(&self) -> &[f64] {
        self.u.last().expect("u_0 is always present")
    }

    /// Largest pointwise gap to another trace, over the common length; the
    /// lengths must agree for traces to be identical.
    pub fn distance(&self, other: &TransfiniteTrace) -> f64 {
        if self.u.len() != other.u.len() {
            return f64::INFINITY;
        }
        self.u
            .iter()
            .zip(&other.u)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// One successor step `u ↦ lim_k envelope(u + θ_k)`, with increments within
/// the candidate tolerance read as zero.
fn successor(candidate: &Candidate, family: &TopologicalFamily, tails: &[Vec<f64>], u: &[f64]) -> Result<Vec<f64>> {
    let shifted: Vec<Vec<f64>> = tails
        .iter()
        .map(|t| t.iter().zip(u).map(|(a, b)| a + b).collect())
        .collect();
    let limit = family.limit_envelope(&shifted)?;
    let snap = candidate.tolerance() + EXACT_SLACK;
    Ok(limit
        .iter()
        .zip(u)
        .map(|(&next, &prev)| if (next - prev).abs() <= snap { prev } else { next.max(prev) })
        .collect())
}

/// Runs the transfinite sequence through successor steps until it repeats
/// (to `1e-12`) or `max_iter` steps have been taken.
pub fn transfinite_sequence(
    candidate: &Candidate,
    family: &TopologicalFamily,
    max_iter: usize,
) -> Result<TransfiniteTrace> {
    candidate.check_family(family)?;
    candidate.certify()?;
    let tails = candidate.tails();
    let mut u = vec![vec![0.0; candidate.points()]];
    for alpha in 0..max_iter {
        let next = successor(candidate, family, &tails, &u[alpha])?;
        let settled = next.iter().zip(&u[alpha]).all(|(a, b)| (a - b).abs() <= EXACT_SLACK);
        u.push(next);
        if settled {
            return Ok(TransfiniteTrace { u, order_of_accumulation: Some(alpha) });
        }
    }
    Ok(TransfiniteTrace { u, order_of_accumulation: None })
}

/// Outcome of [`check_superenvelope`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperenvelopeVerdict {
    pub dominates_target: bool,
    /// `lim_k defect(E − h_k)` per point.
    pub limit_defect: Vec<f64>,
    pub max_defect: f64,
    pub passed: bool,
}

/// Checks `E ≥ h` and `lim_k defect(E − h_k) ≤ tolerance`.
pub fn check_superenvelope(
    e: &[f64],
    candidate: &Candidate,
    family: &TopologicalFamily,
) -> Result<SuperenvelopeVerdict> {
    candidate.check_family(family)?;
    family.check_len(e)?;
    candidate.certify()?;
    let dominates_target = e.iter().zip(candidate.target()).all(|(a, h)| *a >= h - EXACT_SLACK);
    let gaps: Vec<Vec<f64>> = candidate
        .values()
        .iter()
        .map(|hk| e.iter().zip(hk).map(|(a, b)| a - b).collect())
        .collect();
    let limit = family.limit_envelope(&gaps)?;
    let last = gaps.last().expect("nonempty");
    let limit_defect: Vec<f64> = limit.iter().zip(last).map(|(a, b)| a - b).collect();
    let max_defect = limit_defect.iter().copied().fold(0.0, f64::max);
    let passed = dominates_target && max_defect <= candidate.tolerance() + EXACT_SLACK;
    Ok(SuperenvelopeVerdict { dominates_target, limit_defect, max_defect, passed })
}

/// Outcome of [`tail_variational_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailVariationalReport {
    /// `lim_k max_x θ_k(x)`.
    pub tail_sup: f64,
    /// `max_x u_1(x)`.
    pub u1_max: f64,
    pub h_star: f64,
    pub tolerance: f64,
    pub almost_increasing: bool,
    pub passed: bool,
}

/// Compares `lim_k max θ_k` and `max u_1` against `h_star`.
pub fn tail_variational_check(
    candidate: &Candidate,
    family: &TopologicalFamily,
    h_star: f64,
) -> Result<TailVariationalReport> {
    candidate.check_family(family)?;
    candidate.certify()?;
    let tails = candidate.tails();
    let tail_sup = family
        .limit_envelope(&tails)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let u1 = successor(candidate, family, &tails, &vec![0.0; candidate.points()])?;
    let u1_max = u1.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let tolerance = candidate.tolerance();
    let almost_increasing = candidate.is_almost_increasing(&[tolerance]);
    let close = |v: f64| (v - h_star).abs() <= tolerance + EXACT_SLACK;
    let passed = almost_increasing && close(tail_sup) && close(u1_max);
    Ok(TailVariationalReport { tail_sup, u1_max, h_star, tolerance, almost_increasing, passed })
}

/// File form of a family plus candidate: `sequences` rows list term indices
/// followed by the limit index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureInput {
    pub points: Vec<String>,
    #[serde(default)]
    pub sequences: Vec<Vec<usize>>,
    pub h: Vec<f64>,
    pub h_k: Vec<Vec<f64>>,
    #[serde(default)]
    pub tolerance: f64,
}

impl StructureInput {
    pub fn build(&self) -> Result<(TopologicalFamily, Candidate)> {
        let sequences = self
            .sequences
            .iter()
            .map(|row| match row.split_last() {
                Some((&limit, terms)) if !terms.is_empty() => Ok(ConvergingSequence { terms: terms.to_vec(), limit }),
                _ => Err(Error::InvalidArgument("a sequence row needs at least one term and a limit".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        let family = TopologicalFamily::new(self.points.clone(), sequences)?;
        let candidate = Candidate::new(self.h_k.clone(), self.h.clone(), self.tolerance)?;
        candidate.check_family(&family)?;
        Ok((family, candidate))
    }
}

/// Staircase family `q_1..q_{K-1} → p` with `θ_k(q_i) = [i ≥ k]`, `θ_k(p) = 0`
/// and `h ≡ 1`. Point 0 is `p`.
pub fn staircase(horizon: usize) -> Result<(TopologicalFamily, Candidate)> {
    if horizon < 2 {
        return Err(Error::InvalidArgument("staircase needs a horizon of at least 2".into()));
    }
    let m = horizon - 1;
    let mut points = vec!["p".to_string()];
    points.extend((1..=m).map(|i| format!("q{i}")));
    let family = TopologicalFamily::new(
        points,
        vec![ConvergingSequence { terms: (1..=m).collect(), limit: 0 }],
    )?;
    let values = (1..=horizon)
        .map(|k| {
            let mut h = vec![1.0];
            h.extend((1..=m).map(|i| if i >= k { 0.0 } else { 1.0 }));
            h
        })
        .collect();
    Ok((family, Candidate::new(values, vec![1.0; m + 1], 0.0)?))
}

/// Two-level staircase `q_{ij} →_j q_i →_i p` with `θ_k(q_i) = [i ≥ k]`,
/// `θ_k(q_{ij}) = [j ≥ k]` and `h ≡ 2`. Point 0 is `p`, then `q_1..q_M`, then
/// the `q_{ij}` row by row, with `M = K − 1`.
pub fn two_level_staircase(horizon: usize) -> Result<(TopologicalFamily, Candidate)> {
    if horizon < 2 {
        return Err(Error::InvalidArgument("staircase needs a horizon of at least 2".into()));
    }
    let m = horizon - 1;
    let q = |i: usize| i;
    let qq = |i: usize, j: usize| m + (i - 1) * m + j;
    let mut points = vec!["p".to_string()];
    points.extend((1..=m).map(|i| format!("q{i}")));
    for i in 1..=m {
        points.extend((1..=m).map(|j| format!("q{i}_{j}")));
    }
    let mut sequences = vec![ConvergingSequence { terms: (1..=m).map(q).collect(), limit: 0 }];
    sequences.extend((1..=m).map(|i| ConvergingSequence { terms: (1..=m).map(|j| qq(i, j)).collect(), limit: q(i) }));
    let family = TopologicalFamily::new(points, sequences)?;
    let n = family.len();
    let values = (1..=horizon)
        .map(|k| {
            let mut theta = vec![0.0; n];
            for i in 1..=m {
                theta[q(i)] = if i >= k { 1.0 } else { 0.0 };
                for j in 1..=m {
                    theta[qq(i, j)] = if j >= k { 1.0 } else { 0.0 };
                }
            }
            theta.iter().map(|t| 2.0 - t).collect()
        })
        .collect();
    Ok((family, Candidate::new(values, vec![2.0; n], 0.0)?))
}
