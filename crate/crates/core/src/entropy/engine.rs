//! Limit entropies and pressures computed from iterated joins.

use std::sync::Arc;

use serde::Serialize;

use super::fekete::{LimsupEstimate, SubadditiveTrace, SUBADDITIVITY_TOLERANCE};
use super::kernel::{nonzero_factors, Aggregate, Budget, ConditionedWalk, JoinWalk, SupportCell, Windows};
use super::lp::box_simplex_maximize;
use super::statics::{eta, t_log_t};
use crate::error::{Error, Result};
use crate::measure::ShiftMeasure;
use crate::partition::{PartitionOfUnity, DEFAULT_BUDGET};
use crate::symbolic::{same_system, LocallyConstantFunction, SubshiftSystem};

/// A real-valued locally constant potential `g`.
#[derive(Debug, Clone)]
pub struct Potential {
    g: LocallyConstantFunction,
}

impl Potential {
    pub fn new(g: LocallyConstantFunction) -> Self {
        Self { g }
    }

    pub fn zero(system: Arc<SubshiftSystem>) -> Self {
        Self::constant(system, 0.0)
    }

    pub fn constant(system: Arc<SubshiftSystem>, c: f64) -> Self {
        Self::new(LocallyConstantFunction::constant(system, c).expect("constants are valid"))
    }

    pub fn function(&self) -> &LocallyConstantFunction {
        &self.g
    }

    pub fn depth(&self) -> usize {
        self.g.depth()
    }

    /// `S_n g = Σ_{i<n} g ∘ T^i`.
    pub fn birkhoff_sum(&self, n: usize) -> Result<LocallyConstantFunction> {
        self.g.birkhoff_sum(n)
    }
}

/// Per-level sums behind the conditional topological quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalLevels {
    /// `H̃_n(Φ|Ψ)`: the optimum of the box-simplex program at each `n`.
    pub lp: Vec<f64>,
    /// `max_ψ H̃(Φ₀ⁿ⁻¹|ψ)` over surviving `ψ ∈ Ψ₀ⁿ⁻¹`.
    pub max: Vec<f64>,
}

/// Estimates `e[n][k]` of `h̃(Φ_k|Φ_n)` for a partition family; row `n`
/// is the conditioning partition, column `k` the conditioned one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailMatrix {
    /// Growth rate at the horizon: `log H̃_N − log H̃_{N−1}`.
    pub entries: Vec<Vec<f64>>,
    /// Smallest ratio `(1/m) log H̃_m` over horizons `m ≤ N`.
    pub min_ratio: Vec<Vec<f64>>,
    /// Largest ratio over the last third of the horizons.
    pub limsup: Vec<Vec<f64>>,
    pub horizon: usize,
}

impl TailMatrix {
    /// `max_k e[n][k]` per row: the inner limit readout for each `n`.
    pub fn row_suprema(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductCheck {
    pub first: SubadditiveTrace,
    pub second: SubadditiveTrace,
    pub product: SubadditiveTrace,
    /// `max(a_n^X, a_n^Y) ≤ a_n^{X×Y}` per `n`.
    pub lower_holds: Vec<bool>,
    /// `a_n^{X×Y} ≤ a_n^X + a_n^Y` per `n`.
    pub upper_holds: Vec<bool>,
}

impl ProductCheck {
    pub fn passed(&self) -> bool {
        self.lower_holds.iter().chain(&self.upper_holds).all(|&b| b)
    }
}

/// Entry point for every trace computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Engine {
    /// Cap on state entries touched per computation.
    pub budget: u64,
    /// Evaluate independent subtrees on the rayon pool.
    pub parallel: bool,
}

impl Default for Engine {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            parallel: true,
        }
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        Err(Error::InvalidArgument("horizon must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn check_same(a: &Arc<SubshiftSystem>, b: &Arc<SubshiftSystem>) -> Result<()> {
    if same_system(a, b) {
        Ok(())
    } else {
        Err(Error::SystemMismatch)
    }
}

impl Engine {
    pub fn new(budget: u64, parallel: bool) -> Self {
        Self { budget, parallel }
    }

    pub fn serial() -> Self {
        Self {
            parallel: false,
            ..Self::default()
        }
    }

    /// Per-level sums of `leaf(q_t)` over `Φ₀ⁿ⁻¹`, with factors `φ·e^g`.
    fn walk(
        &self,
        phi: &PartitionOfUnity,
        potential: Option<&Potential>,
        measure: Option<&ShiftMeasure>,
        horizon: usize,
        leaf: &(dyn Fn(f64) -> f64 + Sync),
    ) -> Result<Vec<f64>> {
        check_horizon(horizon)?;
        let system = phi.system();
        let width = phi.depth().max(potential.map_or(1, |g| g.depth()));
        let windows = Windows::new(system, width);
        let mut tables = phi.values_at_depth(width)?;
        if let Some(g) = potential {
            check_same(system, g.function().system())?;
            let weight = g.function().refine_to_depth(width)?.map(f64::exp);
            for t in &mut tables {
                for (v, e) in t.iter_mut().zip(weight.values()) {
                    *v *= e;
                }
            }
        }
        let budget = Budget::new(self.budget);
        let aggregate = if measure.is_some() {
            Aggregate::Mass
        } else {
            Aggregate::Sup
        };
        JoinWalk {
            windows: &windows,
            factors: nonzero_factors(&tables, windows.count()),
            aggregate,
            measure,
            initial: measure.map(|mu| mu.weights(width)),
            horizon,
            budget: &budget,
            parallel: self.parallel,
        }
        .run(leaf)
    }

    /// Trace of `a_n = H̃_μ(Φ₀ⁿ⁻¹)` for `n ≤ horizon`.
    ///
    /// The masses `μ(φ_t)` come from the join walk; the second term uses
    /// `Σ_t μ(φ_t log φ_t) = n·μ(Σ_φ φ log φ)`, which follows from
    /// `log Π = Σ log` and invariance of `μ`.
    pub fn local_metric_entropy(
        &self,
        mu: &ShiftMeasure,
        phi: &PartitionOfUnity,
        horizon: usize,
    ) -> Result<SubadditiveTrace> {
        check_same(mu.system(), phi.system())?;
        let sums = self.walk(phi, None, Some(mu), horizon, &eta)?;
        let weights = mu.weights(phi.depth());
        let inner: f64 = phi
            .members()
            .iter()
            .map(|m| {
                weights
                    .iter()
                    .zip(m.values())
                    .map(|(w, &v)| w * t_log_t(v))
                    .sum::<f64>()
            })
            .sum();
        let values = sums
            .iter()
            .enumerate()
            .map(|(i, s)| s + (i + 1) as f64 * inner)
            .collect();
        SubadditiveTrace::new(values)
    }

    /// Trace of `log H̃(Φ₀ⁿ⁻¹)`.
    pub fn local_topological_entropy(
        &self,
        phi: &PartitionOfUnity,
        horizon: usize,
    ) -> Result<SubadditiveTrace> {
        let sums = self.walk(phi, None, None, horizon, &|q| q)?;
        SubadditiveTrace::new(sums.iter().map(|s| s.ln()).collect())
    }

    /// Trace of `a_n + n·μ(g)` with `a_n = H̃_μ(Φ₀ⁿ⁻¹)`.
    pub fn metric_pressure(
        &self,
        mu: &ShiftMeasure,
        g: &Potential,
        phi: &PartitionOfUnity,
        horizon: usize,
    ) -> Result<SubadditiveTrace> {
        let shift = mu.integrate(g.function())?;
        Ok(self.local_metric_entropy(mu, phi, horizon)?.shifted(shift))
    }

    /// Trace of `log Σ_{φ∈Φ₀ⁿ⁻¹} sup φ·e^{S_n g}`.
    pub fn topological_pressure(
        &self,
        g: &Potential,
        phi: &PartitionOfUnity,
        horizon: usize,
    ) -> Result<SubadditiveTrace> {
        let sums = self.walk(phi, Some(g), None, horizon, &|q| q)?;
        SubadditiveTrace::new(sums.iter().map(|s| s.ln()).collect())
    }

    fn conditional_cells(
        &self,
        phi: &PartitionOfUnity,
        psi: &PartitionOfUnity,
        potential: Option<&Potential>,
        horizon: usize,
    ) -> Result<Vec<Vec<SupportCell>>> {
        check_horizon(horizon)?;
        check_same(phi.system(), psi.system())?;
        let system = phi.system();
        let width = phi
            .depth()
            .max(psi.depth())
            .max(potential.map_or(1, |g| g.depth()));
        let windows = Windows::new(system, width);
        let mut tables = phi.values_at_depth(width)?;
        if let Some(g) = potential {
            check_same(system, g.function().system())?;
            let weight = g.function().refine_to_depth(width)?.map(f64::exp);
            for t in &mut tables {
                for (v, e) in t.iter_mut().zip(weight.values()) {
                    *v *= e;
                }
            }
        }
        let budget = Budget::new(self.budget);
        ConditionedWalk {
            windows: &windows,
            phi_factors: nonzero_factors(&tables, windows.count()),
            psi_tables: psi.values_at_depth(width)?,
            horizon,
            budget: &budget,
            parallel: self.parallel,
        }
        .run()
    }

    /// `H̃_n(Φ|Ψ)` and `max_ψ H̃(Φ₀ⁿ⁻¹|ψ)` for `n ≤ horizon`, with the
    /// weight `e^{S_n g}` inside the sups when a potential is given.
    ///
    /// Members of `Ψ₀ⁿ⁻¹` with equal supports share the same objective
    /// coefficient, so the program is solved over support classes with
    /// summed bounds; this has the same optimum as the per-member program.
    pub fn conditional_levels(
        &self,
        phi: &PartitionOfUnity,
        psi: &PartitionOfUnity,
        potential: Option<&Potential>,
        horizon: usize,
    ) -> Result<ConditionalLevels> {
        let cells = self.conditional_cells(phi, psi, potential, horizon)?;
        let mut lp = Vec::with_capacity(horizon);
        let mut max = Vec::with_capacity(horizon);
        for level in &cells {
            let c: Vec<f64> = level.iter().map(|c| c.objective).collect();
            let lower: Vec<f64> = level.iter().map(|c| c.lower).collect();
            let upper: Vec<f64> = level.iter().map(|c| c.upper).collect();
            lp.push(box_simplex_maximize(&c, &lower, &upper)?.value);
            max.push(c.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
        Ok(ConditionalLevels { lp, max })
    }

    /// `limsup (1/n) log H̃_n(Φ|Ψ)`, read out over the last third of the
    /// horizons.
    pub fn conditional_topological_entropy(
        &self,
        phi: &PartitionOfUnity,
        psi: &PartitionOfUnity,
        horizon: usize,
    ) -> Result<LimsupEstimate> {
        let levels = self.conditional_levels(phi, psi, None, horizon)?;
        LimsupEstimate::new(levels.lp.iter().map(|v| v.ln()).collect())
    }

    /// `lim (1/n) log max_ψ H̃(Φ₀ⁿ⁻¹|ψ)`, a subadditive trace.
    pub fn conditional_topological_entropy_plus(
        &self,
        phi: &PartitionOfUnity,
        psi: &PartitionOfUnity,
        horizon: usize,
    ) -> Result<SubadditiveTrace> {
        let levels = self.conditional_levels(phi, psi, None, horizon)?;
        SubadditiveTrace::new(levels.max.iter().map(|v| v.ln()).collect())
    }

    /// Conditional topological pressure `limsup (1/n) log P̃_n(T,g,Φ|Ψ)`.
    pub fn conditional_topological_pressure(
        &self,
        g: &Potential,
        phi: &PartitionOfUnity,
        psi: &PartitionOfUnity,
        horizon: usize,
    ) -> Result<LimsupEstimate> {
        let levels = self.conditional_levels(phi, psi, Some(g), horizon)?;
        LimsupEstimate::new(levels.lp.iter().map(|v| v.ln()).collect())
    }

    /// `e[n][k] ≈ h̃(Φ_k|Φ_n)` for a family with nonincreasing diameters.
    pub fn tail_entropy_estimate(
        &self,
        family: &[PartitionOfUnity],
        horizon: usize,
    ) -> Result<TailMatrix> {
        self.tail_matrix(None, family, horizon)
    }

    /// `e[n][k] ≈ P̃(T,g,Φ_k|Φ_n)`; `g ≡ 0` reproduces the entropy matrix.
    pub fn tail_pressure_estimate(
        &self,
        g: &Potential,
        family: &[PartitionOfUnity],
        horizon: usize,
    ) -> Result<TailMatrix> {
        self.tail_matrix(Some(g), family, horizon)
    }

    fn tail_matrix(
        &self,
        g: Option<&Potential>,
        family: &[PartitionOfUnity],
        horizon: usize,
    ) -> Result<TailMatrix> {
        if family.is_empty() {
            return Err(Error::InvalidArgument("empty partition family".into()));
        }
        let diameters = family
            .iter()
            .map(|p| p.diameter())
            .collect::<Result<Vec<_>>>()?;
        if let Some(k) = (1..diameters.len()).find(|&k| diameters[k] > diameters[k - 1]) {
            return Err(Error::InvalidArgument(format!(
                "diameter increases at family index {k} ({} > {})",
                diameters[k],
                diameters[k - 1]
            )));
        }
        let size = family.len();
        let mut entries = vec![Vec::with_capacity(size); size];
        let mut min_ratio = vec![Vec::with_capacity(size); size];
        let mut limsup = vec![Vec::with_capacity(size); size];
        for (n, psi) in family.iter().enumerate() {
            for phi in family {
                let levels = self.conditional_levels(phi, psi, g, horizon)?;
                let est = LimsupEstimate::new(levels.lp.iter().map(|v| v.ln()).collect())?;
                entries[n].push(*est.differences().last().expect("horizon >= 1"));
                min_ratio[n].push(est.min_ratio);
                limsup[n].push(est.limsup);
            }
        }
        Ok(TailMatrix {
            entries,
            min_ratio,
            limsup,
            horizon,
        })
    }

    /// Traces for `(X, μ_X, Φ)`, `(Y, μ_Y, Ψ)` and their product, with the
    /// per-`n` sandwich `max(a^X, a^Y) ≤ a^{X×Y} ≤ a^X + a^Y`.
    pub fn product_system_entropy_check(
        &self,
        mu_x: &ShiftMeasure,
        phi: &PartitionOfUnity,
        mu_y: &ShiftMeasure,
        psi: &PartitionOfUnity,
        horizon: usize,
    ) -> Result<ProductCheck> {
        let system = Arc::new(mu_x.system().product(mu_y.system())?);
        let mu = mu_x.product(mu_y, system.clone())?;
        let tensor = phi.tensor(psi, system)?;
        let first = self.local_metric_entropy(mu_x, phi, horizon)?;
        let second = self.local_metric_entropy(mu_y, psi, horizon)?;
        let product = self.local_metric_entropy(&mu, &tensor, horizon)?;
        let mut lower_holds = Vec::with_capacity(horizon);
        let mut upper_holds = Vec::with_capacity(horizon);
        for ((a, b), c) in first.values().iter().zip(second.values()).zip(product.values()) {
            lower_holds.push(a.max(*b) <= c + SUBADDITIVITY_TOLERANCE);
            upper_holds.push(*c <= a + b + SUBADDITIVITY_TOLERANCE);
        }
        Ok(ProductCheck {
            first,
            second,
            product,
            lower_holds,
            upper_holds,
        })
    }
}
