//! Partitions of unity made of locally constant functions, their joins,
//! iterated joins, diameters and scaled copies.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symbolic::{same_system, LocallyConstantFunction, SubshiftSystem, Symbol, Word};

/// Residual tolerance for `Σ φ ≡ 1`.
pub const PARTITION_TOLERANCE: f64 = 1e-12;

/// Default cap on word evaluations for materialized joins and entropy kernels.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// `|Σ φ(w) − 1|` per admissible word at the common depth.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub passed: bool,
}

/// Checks that a raw member list sums to one and takes values in `[0, 1]`.
pub fn validate_members(members: &[LocallyConstantFunction]) -> Result<ValidationReport> {
    let first = members.first().ok_or(Error::EmptyPartition)?;
    let system = first.system().clone();
    let depth = members.iter().map(|m| m.depth()).max().unwrap_or(1);
    let mut sums = vec![0.0; system.words(depth).len()];
    let mut in_range = true;
    for m in members {
        if !same_system(m.system(), &system) {
            return Err(Error::SystemMismatch);
        }
        let refined = m.refine_to_depth(depth)?;
        for (s, &v) in sums.iter_mut().zip(refined.values()) {
            in_range &= (0.0..=1.0).contains(&v);
            *s += v;
        }
    }
    let residuals: Vec<f64> = sums.iter().map(|s| (s - 1.0).abs()).collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(ValidationReport {
        passed: in_range && max_residual <= PARTITION_TOLERANCE,
        residuals,
        max_residual,
    })
}

/// Member tuple `(i_0, …, i_{n-1})` naming the product `Π_j φ_{i_j} ∘ T^j`
/// inside an iterated join; position `j` is the time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JoinIndex(pub Vec<usize>);

impl JoinIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A finite family of `[0, 1]`-valued locally constant functions summing to
/// one, all stored at a common depth.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    system: Arc<SubshiftSystem>,
    depth: usize,
    members: Vec<LocallyConstantFunction>,
}

impl PartitionOfUnity {
    /// Refines the members to a common depth and checks the partition
    /// property.
    pub fn new(members: Vec<LocallyConstantFunction>) -> Result<Self> {
        let report = validate_members(&members)?;
        if !report.passed {
            if let Some(bad) = members
                .iter()
                .flat_map(|m| m.values())
                .find(|v| !(0.0..=1.0).contains(*v))
            {
                return Err(Error::InvalidFunction(format!(
                    "member value {bad} outside [0, 1]"
                )));
            }
            return Err(Error::NotPartition {
                max_residual: report.max_residual,
            });
        }
        Ok(Self::from_checked(members))
    }

    fn from_checked(members: Vec<LocallyConstantFunction>) -> Self {
        let system = members[0].system().clone();
        let depth = members.iter().map(|m| m.depth()).max().unwrap_or(1);
        let members = members
            .into_iter()
            .map(|m| m.refine_to_depth(depth).expect("depth is the maximum"))
            .collect();
        Self {
            system,
            depth,
            members,
        }
    }

    /// Builds a partition from per-member value vectors aligned with
    /// `system.words(depth)`.
    pub fn from_values(system: Arc<SubshiftSystem>, depth: usize, values: Vec<Vec<f64>>) -> Result<Self> {
        let members = values
            .into_iter()
            .map(|v| LocallyConstantFunction::new(system.clone(), depth, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    /// Builds a partition from word-keyed tables; missing words read as 0.
    pub fn explicit(
        system: Arc<SubshiftSystem>,
        depth: usize,
        tables: &[HashMap<Word, f64>],
    ) -> Result<Self> {
        let members = tables
            .iter()
            .map(|t| LocallyConstantFunction::from_table(system.clone(), depth, t, 0.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    /// The trivial partition `{1}`.
    pub fn trivial(system: Arc<SubshiftSystem>) -> Self {
        let one = LocallyConstantFunction::constant(system, 1.0).expect("constant is valid");
        Self::from_checked(vec![one])
    }

    pub fn system(&self) -> &Arc<SubshiftSystem> {
        &self.system
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn members(&self) -> &[LocallyConstantFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_members(&self.members).expect("partitions are nonempty")
    }

    pub fn is_indicator(&self) -> bool {
        self.members.iter().all(|m| m.is_indicator())
    }

    /// Member value tables read at a finer depth.
    pub fn values_at_depth(&self, depth: usize) -> Result<Vec<Vec<f64>>> {
        self.members
            .iter()
            .map(|m| m.refine_to_depth(depth).map(|f| f.values().to_vec()))
            .collect()
    }

    pub fn refine_to_depth(&self, depth: usize) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| m.refine_to_depth(depth))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            system: self.system.clone(),
            depth,
            members,
        })
    }

    /// `T^j Φ`.
    pub fn pullback_by(&self, steps: usize) -> Self {
        Self {
            system: self.system.clone(),
            depth: self.depth + steps,
            members: self
                .members
                .iter()
                .map(|m| m.shift_pullback_by(steps))
                .collect(),
        }
    }

    /// `Φ ∨ Ψ` with identically zero products removed. Members are ordered
    /// lexicographically by `(i, j)`.
    pub fn join(&self, other: &Self) -> Result<Self> {
        Ok(self.join_indexed(other)?.0)
    }

    fn join_indexed(&self, other: &Self) -> Result<(Self, Vec<(usize, usize)>)> {
        if !same_system(&self.system, &other.system) {
            return Err(Error::SystemMismatch);
        }
        let depth = self.depth.max(other.depth);
        let left = self.values_at_depth(depth)?;
        let right = other.values_at_depth(depth)?;
        let (values, pairs) = if self.is_indicator() && other.is_indicator() {
            join_indicator_tables(&left, &right)
        } else {
            join_tables(&left, &right)
        };
        let members = values
            .into_iter()
            .map(|v| LocallyConstantFunction::new(self.system.clone(), depth, v))
            .collect::<Result<Vec<_>>>()?;
        Ok((
            Self {
                system: self.system.clone(),
                depth,
                members,
            },
            pairs,
        ))
    }

    /// `Φ₀ⁿ⁻¹ = ⋁_{j<n} T^j Φ` with zero products removed, using the default
    /// budget.
    pub fn iterate_join(&self, n: usize) -> Result<Self> {
        Ok(self.iterate_join_indexed(n, DEFAULT_BUDGET)?.0)
    }

    /// Iterated join together with the member tuple behind each product.
    ///
    /// Refuses when `|Φ|^n · |A|^(depth+n-1)` exceeds `budget`; for indicator
    /// partitions the bound is the number of admissible words times `n`,
    /// which is what the cylinder-intersection path costs.
    pub fn iterate_join_indexed(&self, n: usize, budget: u64) -> Result<(Self, Vec<JoinIndex>)> {
        if n == 0 {
            return Err(Error::InvalidArgument("iterated joins need n >= 1".into()));
        }
        let needed = self.iterate_join_cost(n);
        if needed > budget as f64 {
            return Err(Error::BudgetExceeded {
                needed: needed.min(u64::MAX as f64) as u64,
                budget,
            });
        }
        let mut current = self.clone();
        let mut indices: Vec<JoinIndex> = (0..self.len()).map(|i| JoinIndex(vec![i])).collect();
        for j in 1..n {
            let (joined, pairs) = current.join_indexed(&self.pullback_by(j))?;
            indices = pairs
                .into_iter()
                .map(|(a, b)| {
                    let mut t = indices[a].0.clone();
                    t.push(b);
                    JoinIndex(t)
                })
                .collect();
            current = joined;
        }
        let (kept_members, kept_indices): (Vec<_>, Vec<_>) = current
            .members
            .into_iter()
            .zip(indices)
            .filter(|(m, _)| !m.is_zero())
            .unzip();
        current.members = kept_members;
        Ok((current, kept_indices))
    }

    fn iterate_join_cost(&self, n: usize) -> f64 {
        let depth = self.depth + n - 1;
        if self.is_indicator() {
            self.system.words(self.depth).len() as f64
                * (self.system.alphabet_size() as f64).powi((n - 1) as i32)
                * n as f64
        } else {
            (self.len() as f64).powi(n as i32)
                * (self.system.alphabet_size() as f64).powi(depth as i32)
        }
    }

    /// `max_φ diam(supp φ)`.
    pub fn diameter(&self) -> Result<f64> {
        let table = self.system.words(self.depth);
        let mut diameter: f64 = 0.0;
        for (i, m) in self.members.iter().enumerate() {
            let mut support = m
                .values()
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(w, _)| table.word(w));
            let first = support.next().ok_or(Error::EmptySupport(i))?;
            // words are sorted, so the widest pair is the first and the last
            let last = support.next_back().unwrap_or(first);
            let common = first.iter().zip(last).take_while(|(a, b)| a == b).count();
            diameter = diameter.max((2.0f64).powi(-(common as i32)));
        }
        Ok(diameter)
    }

    /// `Φ ⊗ Ψ = {φ(x)ψ(y)}` on the product system built by
    /// [`SubshiftSystem::product`], members ordered by `(i, j)`.
    pub fn tensor(&self, other: &Self, product: Arc<SubshiftSystem>) -> Result<Self> {
        let nb = other.system.alphabet_size();
        if product.alphabet_size() != self.system.alphabet_size() * nb {
            return Err(Error::SystemMismatch);
        }
        let depth = self.depth.max(other.depth);
        let left = self.refine_to_depth(depth)?;
        let right = other.refine_to_depth(depth)?;
        let table = product.words(depth);
        let mut xs = vec![0 as Symbol; depth];
        let mut ys = vec![0 as Symbol; depth];
        let mut members = Vec::with_capacity(self.len() * other.len());
        for a in left.members() {
            for b in right.members() {
                let values = table
                    .iter()
                    .map(|w| {
                        for (k, &s) in w.iter().enumerate() {
                            xs[k] = s / nb as Symbol;
                            ys[k] = s % nb as Symbol;
                        }
                        a.value(&xs) * b.value(&ys)
                    })
                    .collect();
                members.push(LocallyConstantFunction::new(product.clone(), depth, values)?);
            }
        }
        Ok(Self {
            system: product,
            depth,
            members,
        })
    }

    /// `k·Ψ`: every member replaced by `k` copies of `ψ / k`.
    pub fn scale_copies(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("need at least one copy".into()));
        }
        let scale = 1.0 / k as f64;
        let members = self
            .members
            .iter()
            .flat_map(|m| std::iter::repeat_n(m.scale(scale), k))
            .collect();
        Ok(Self {
            system: self.system.clone(),
            depth: self.depth,
            members,
        })
    }
}

/// Indicators of the admissible depth-`k` cylinders, in lexicographic order.
pub fn make_cylinder_partition(system: Arc<SubshiftSystem>, depth: usize) -> Result<PartitionOfUnity> {
    make_smoothed_partition(system, depth, 0.0)
}

/// `(1−λ)·𝟙_C + λ/r` for each of the `r` admissible depth-`k` cylinders `C`.
pub fn make_smoothed_partition(
    system: Arc<SubshiftSystem>,
    depth: usize,
    lambda: f64,
) -> Result<PartitionOfUnity> {
    if depth == 0 {
        return Err(Error::InvalidArgument("cylinder depth must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "smoothing must lie in [0, 1), got {lambda}"
        )));
    }
    let r = system.words(depth).len();
    let floor = lambda / r as f64;
    let members = (0..r)
        .map(|c| {
            let values = (0..r)
                .map(|w| if w == c { 1.0 - lambda + floor } else { floor })
                .collect();
            LocallyConstantFunction::new(system.clone(), depth, values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PartitionOfUnity::from_checked(members))
}

fn join_tables(left: &[Vec<f64>], right: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<(usize, usize)>) {
    let mut values = Vec::new();
    let mut pairs = Vec::new();
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            let product: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
            if product.iter().any(|&v| v != 0.0) {
                values.push(product);
                pairs.push((i, j));
            }
        }
    }
    (values, pairs)
}

/// Indicator join by cylinder intersection: one pass over the words.
fn join_indicator_tables(
    left: &[Vec<f64>],
    right: &[Vec<f64>],
) -> (Vec<Vec<f64>>, Vec<(usize, usize)>) {
    let words = left.first().map_or(0, |v| v.len());
    let owner = |table: &[Vec<f64>], w: usize| table.iter().position(|m| m[w] == 1.0);
    let mut cells: Vec<((usize, usize), usize)> = (0..words)
        .filter_map(|w| Some(((owner(left, w)?, owner(right, w)?), w)))
        .collect();
    cells.sort_unstable();
    let mut values: Vec<Vec<f64>> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (pair, w) in cells {
        if pairs.last() != Some(&pair) {
            pairs.push(pair);
            values.push(vec![0.0; words]);
        }
        values.last_mut().expect("pushed above")[w] = 1.0;
    }
    (values, pairs)
}

/// Words of the admissible depth-`depth` table, for callers that need to
/// iterate supports.
pub fn support_words(f: &LocallyConstantFunction) -> Vec<Vec<Symbol>> {
    let table = f.system().words(f.depth());
    f.values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(w, _)| table.word(w).to_vec())
        .collect()
}
