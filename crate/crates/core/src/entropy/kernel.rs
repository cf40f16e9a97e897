//! Enumeration kernels for iterated joins.
//!
//! A member of `Φ₀ⁿ⁻¹` is a tuple `(i_0, …, i_{n-1})`. The tuple tree is
//! walked level by level; each node carries a sparse state vector indexed by
//! the admissible words of a fixed window length `w` (the largest depth among
//! the functions involved). Entry `u` of the state at level `j` aggregates,
//! over all admissible words `x_0 … x_{j+w-1}` whose last window is `u`, the
//! product `Π_{l≤j} F_{i_l}(x_l … x_{l+w-1})`, weighted by the measure for
//! masses. Sums aggregate masses, maxima aggregate sups. Because every
//! admissible word extends, the level-`j` quantity of the tuple is the
//! aggregate of its state, so one walk to depth `N` serves every `n ≤ N`.
//!
//! Zero entries are never stored and zero states are pruned, which makes
//! indicator partitions cost one entry per admissible word. Everything below
//! a node depends only on its state, so nodes with equal states are merged
//! and carry a multiplicity. States are compared after dropping the lowest
//! [`MERGE_DROPPED_BITS`] mantissa bits, so products of the same factors
//! taken in different orders still merge.
//!
//! Children are generated in parallel when enabled; merging and summation
//! follow node order, so serial and parallel runs produce identical bits.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::ShiftMeasure;
use crate::symbolic::SubshiftSystem;

type Sparse = Vec<(u32, f64)>;

/// Mantissa bits ignored when deciding that two states are equal.
pub const MERGE_DROPPED_BITS: u32 = 10;

fn quantize(v: f64) -> u64 {
    v.to_bits() >> MERGE_DROPPED_BITS
}

/// Admissible windows of one length with their successor structure.
pub(crate) struct Windows {
    count: usize,
    succ: Vec<Vec<u32>>,
    last: Vec<usize>,
}

impl Windows {
    pub(crate) fn new(system: &SubshiftSystem, width: usize) -> Self {
        let table = system.words(width);
        let count = table.len();
        let mut succ = vec![Vec::new(); count];
        let mut last = Vec::with_capacity(count);
        let mut next = Vec::with_capacity(width);
        for (u, word) in table.iter().enumerate() {
            last.push(*word.last().expect("windows are nonempty") as usize);
            for a in 0..system.alphabet_size() {
                if !system.allows(last[u], a) {
                    continue;
                }
                next.clear();
                next.extend_from_slice(&word[1..]);
                next.push(a as u16);
                if let Some(v) = table.index_of(&next) {
                    succ[u].push(v as u32);
                }
            }
        }
        Self { count, succ, last }
    }

    pub(crate) fn count(&self) -> usize {
        self.count
    }
}

/// Counter of state entries touched, shared by one computation.
pub(crate) struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Self {
            limit,
            used: AtomicU64::new(0),
        }
    }

    fn charge(&self, amount: usize) -> Result<()> {
        let used = self.used.fetch_add(amount as u64, Ordering::Relaxed) + amount as u64;
        if used > self.limit {
            return Err(Error::BudgetExceeded {
                needed: used,
                budget: self.limit,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Aggregate {
    /// Measure-weighted sums (masses).
    Mass,
    /// Maxima (sups).
    Sup,
}

/// Per-window list of `(member, factor)` with nonzero factor.
pub(crate) fn nonzero_factors(tables: &[Vec<f64>], windows: usize) -> Vec<Vec<(u32, f64)>> {
    let mut nz = vec![Vec::new(); windows];
    for (i, t) in tables.iter().enumerate() {
        for (u, &v) in t.iter().enumerate() {
            if v != 0.0 {
                nz[u].push((i as u32, v));
            }
        }
    }
    nz
}

fn reduce(state: &[(u32, f64)], aggregate: Aggregate) -> f64 {
    match aggregate {
        Aggregate::Mass => state.iter().map(|e| e.1).sum(),
        Aggregate::Sup => state.iter().map(|e| e.1).fold(0.0, f64::max),
    }
}

fn sparse_key(state: &Sparse) -> Vec<u64> {
    state
        .iter()
        .flat_map(|&(u, v)| [u as u64, quantize(v)])
        .collect()
}

/// Merges items with equal keys, summing multiplicities; the first
/// occurrence is kept as representative, so the result follows input order.
fn merge_equal<T>(items: Vec<(T, f64)>, key: impl Fn(&T) -> Vec<u64>) -> Vec<(T, f64)> {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::with_capacity(items.len());
    let mut out: Vec<(T, f64)> = Vec::with_capacity(items.len());
    for (item, mult) in items {
        match index.entry(key(&item)) {
            Entry::Occupied(e) => out[*e.get()].1 += mult,
            Entry::Vacant(e) => {
                e.insert(out.len());
                out.push((item, mult));
            }
        }
    }
    out
}

fn map_ordered<T: Sync, R: Send>(parallel: bool, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

fn propagate(windows: &Windows, measure: Option<&ShiftMeasure>, aggregate: Aggregate, state: &Sparse) -> Sparse {
    let mut out = Vec::with_capacity(state.len() * 2);
    for &(u, v) in state {
        let from = windows.last[u as usize];
        for &next in &windows.succ[u as usize] {
            let weight = match (aggregate, measure) {
                (Aggregate::Mass, Some(mu)) => mu.transition_prob(from, windows.last[next as usize]),
                _ => 1.0,
            };
            let value = v * weight;
            if value != 0.0 {
                out.push((next, value));
            }
        }
    }
    // stable, so equal windows combine in a fixed order
    out.sort_by_key(|e| e.0);
    let mut merged: Sparse = Vec::with_capacity(out.len());
    for (u, v) in out {
        match merged.last_mut() {
            Some(last) if last.0 == u => match aggregate {
                Aggregate::Mass => last.1 += v,
                Aggregate::Sup => last.1 = last.1.max(v),
            },
            _ => merged.push((u, v)),
        }
    }
    merged
}

/// Splits a propagated state into one child per member with nonzero
/// product, in member order, skipping windows rejected by `keep`.
fn split_by_member(g: &Sparse, factors: &[Vec<(u32, f64)>], keep: impl Fn(u32) -> bool) -> Vec<Sparse> {
    let mut tagged: Vec<(u32, u32, f64)> = Vec::new();
    for &(u, v) in g {
        if !keep(u) {
            continue;
        }
        for &(member, f) in &factors[u as usize] {
            let value = v * f;
            if value != 0.0 {
                tagged.push((member, u, value));
            }
        }
    }
    // stable: windows stay sorted inside each member group
    tagged.sort_by_key(|e| e.0);
    let mut out: Vec<Sparse> = Vec::new();
    let mut current: Option<u32> = None;
    for (member, u, value) in tagged {
        if current != Some(member) {
            out.push(Vec::new());
            current = Some(member);
        }
        out.last_mut().expect("pushed above").push((u, value));
    }
    out
}

/// Walk over the unconditioned iterated join.
pub(crate) struct JoinWalk<'a> {
    pub windows: &'a Windows,
    pub factors: Vec<Vec<(u32, f64)>>,
    pub aggregate: Aggregate,
    pub measure: Option<&'a ShiftMeasure>,
    /// Masses of the windows; `None` starts every window at 1.
    pub initial: Option<Vec<f64>>,
    pub horizon: usize,
    pub budget: &'a Budget,
    pub parallel: bool,
}

impl<'a> JoinWalk<'a> {
    /// Per level `n` (index `n-1`), `Σ_t leaf(q_t)` over the surviving tuples
    /// of length `n`, where `q_t` is the tuple's mass or sup.
    pub(crate) fn run(&self, leaf: &(dyn Fn(f64) -> f64 + Sync)) -> Result<Vec<f64>> {
        let root: Sparse = (0..self.windows.count)
            .map(|u| (u as u32, self.initial.as_ref().map_or(1.0, |w| w[u])))
            .filter(|e| e.1 != 0.0)
            .collect();
        let mut nodes: Vec<(Sparse, f64)> = merge_equal(
            split_by_member(&root, &self.factors, |_| true)
                .into_iter()
                .map(|s| (s, 1.0))
                .collect(),
            sparse_key,
        );
        let mut totals = Vec::with_capacity(self.horizon);
        for level in 0..self.horizon {
            self.budget.charge(nodes.iter().map(|n| n.0.len()).sum())?;
            totals.push(
                nodes
                    .iter()
                    .map(|(s, m)| m * leaf(reduce(s, self.aggregate)))
                    .sum(),
            );
            if level + 1 == self.horizon {
                break;
            }
            let children = map_ordered(self.parallel, &nodes, |(s, m)| {
                let g = propagate(self.windows, self.measure, self.aggregate, s);
                split_by_member(&g, &self.factors, |_| true)
                    .into_iter()
                    .map(|c| (c, *m))
                    .collect::<Vec<_>>()
            });
            nodes = merge_equal(children.into_iter().flatten().collect(), sparse_key);
        }
        Ok(totals)
    }
}

/// Per-level output of the conditioned walk: one entry per surviving support
/// of `Ψ₀ⁿ⁻¹` members.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SupportCell {
    /// `Σ_t sup_{supp ψ} φ_t` (weighted by `e^{S_n g}` when a potential is set).
    pub objective: f64,
    /// `Σ inf ψ` over the `ψ` sharing this support.
    pub lower: f64,
    /// `Σ sup ψ` over the same `ψ`.
    pub upper: f64,
}

#[derive(Clone)]
struct PsiState {
    /// `(window, max, min)` over words where every factor is positive.
    entries: Vec<(u32, f64, f64)>,
    /// Some admissible word already makes the product vanish.
    hit_zero: bool,
}

fn psi_key(p: &PsiState) -> Vec<u64> {
    let mut key: Vec<u64> = p
        .entries
        .iter()
        .flat_map(|&(u, mx, mn)| [u as u64, quantize(mx), quantize(mn)])
        .collect();
    key.push(p.hit_zero as u64);
    key
}

struct CondNode {
    psis: Vec<(PsiState, f64)>,
    phis: Vec<(Sparse, f64)>,
}

type Class = (Vec<bool>, Vec<usize>);

/// Walk over `Ψ₀ⁿ⁻¹` grouped by support, carrying the `Φ₀ⁿ⁻¹` sup states
/// restricted to each support.
pub(crate) struct ConditionedWalk<'a> {
    pub windows: &'a Windows,
    /// `φ_i · e^g` per window.
    pub phi_factors: Vec<Vec<(u32, f64)>>,
    /// `ψ_i` values per member, dense over windows.
    pub psi_tables: Vec<Vec<f64>>,
    pub horizon: usize,
    pub budget: &'a Budget,
    pub parallel: bool,
}

impl<'a> ConditionedWalk<'a> {
    /// Support classes: nonzero members with equal supports share a class.
    fn classes(&self) -> Vec<Class> {
        let mut classes: Vec<Class> = Vec::new();
        for (i, t) in self.psi_tables.iter().enumerate() {
            let mask: Vec<bool> = t.iter().map(|&v| v > 0.0).collect();
            if !mask.iter().any(|&b| b) {
                continue;
            }
            match classes.iter_mut().find(|c| c.0 == mask) {
                Some(c) => c.1.push(i),
                None => classes.push((mask, vec![i])),
            }
        }
        classes
    }

    /// Per level, the cells of all surviving support sequences.
    ///
    /// With a single support class there is a single cell per level and the
    /// program's optimum is its objective, so the `ψ` bounds are not tracked
    /// and the cell reports the trivial bounds `[0, 1]`.
    pub(crate) fn run(&self) -> Result<Vec<Vec<SupportCell>>> {
        let classes = self.classes();
        let track_bounds = classes.len() > 1;
        let root = CondNode {
            psis: vec![(
                PsiState {
                    entries: (0..self.windows.count).map(|u| (u as u32, 1.0, 1.0)).collect(),
                    hit_zero: false,
                },
                1.0,
            )],
            phis: vec![((0..self.windows.count).map(|u| (u as u32, 1.0)).collect(), 1.0)],
        };
        let mut nodes = self.children(&classes, &root, false, track_bounds);
        let mut cells = Vec::with_capacity(self.horizon);
        for level in 0..self.horizon {
            let work: usize = nodes
                .iter()
                .map(|n| {
                    n.psis.iter().map(|p| p.0.entries.len()).sum::<usize>()
                        + n.phis.iter().map(|p| p.0.len()).sum::<usize>()
                })
                .sum();
            self.budget.charge(work)?;
            cells.push(nodes.iter().map(|n| cell(n, track_bounds)).collect());
            if level + 1 == self.horizon {
                break;
            }
            let children = map_ordered(self.parallel, &nodes, |n| {
                self.children(&classes, n, true, track_bounds)
            });
            nodes = children.into_iter().flatten().collect();
        }
        Ok(cells)
    }

    /// One child per support class with surviving members. The root's
    /// all-ones states are used without propagation.
    fn children(
        &self,
        classes: &[Class],
        node: &CondNode,
        propagate_first: bool,
        track_bounds: bool,
    ) -> Vec<CondNode> {
        let psis: Vec<(PsiState, f64)> = if !track_bounds {
            Vec::new()
        } else if propagate_first {
            node.psis
                .iter()
                .map(|(p, m)| (self.propagate_psi(p), *m))
                .collect()
        } else {
            node.psis.clone()
        };
        let phis: Vec<(Sparse, f64)> = if propagate_first {
            node.phis
                .iter()
                .map(|(p, m)| (propagate(self.windows, None, Aggregate::Sup, p), *m))
                .collect()
        } else {
            node.phis.clone()
        };
        let mut out = Vec::new();
        for (mask, members) in classes {
            let mut child_psis = Vec::new();
            for (p, mult) in &psis {
                for &i in members {
                    let table = &self.psi_tables[i];
                    let mut hit_zero = p.hit_zero;
                    let mut entries = Vec::with_capacity(p.entries.len());
                    for &(u, mx, mn) in &p.entries {
                        let f = table[u as usize];
                        if f > 0.0 {
                            entries.push((u, mx * f, mn * f));
                        } else {
                            hit_zero = true;
                        }
                    }
                    if !entries.is_empty() {
                        child_psis.push((PsiState { entries, hit_zero }, *mult));
                    }
                }
            }
            if track_bounds && child_psis.is_empty() {
                continue;
            }
            let child_phis: Vec<(Sparse, f64)> = phis
                .iter()
                .flat_map(|(g, mult)| {
                    split_by_member(g, &self.phi_factors, |u| mask[u as usize])
                        .into_iter()
                        .map(move |s| (s, *mult))
                })
                .collect();
            if child_phis.is_empty() {
                continue;
            }
            out.push(CondNode {
                psis: merge_equal(child_psis, psi_key),
                phis: merge_equal(child_phis, sparse_key),
            });
        }
        out
    }

    fn propagate_psi(&self, p: &PsiState) -> PsiState {
        let mut out: Vec<(u32, f64, f64)> = Vec::with_capacity(p.entries.len() * 2);
        for &(u, mx, mn) in &p.entries {
            for &next in &self.windows.succ[u as usize] {
                out.push((next, mx, mn));
            }
        }
        out.sort_by_key(|e| e.0);
        let mut merged: Vec<(u32, f64, f64)> = Vec::with_capacity(out.len());
        for (u, mx, mn) in out {
            match merged.last_mut() {
                Some(last) if last.0 == u => {
                    last.1 = last.1.max(mx);
                    last.2 = last.2.min(mn);
                }
                _ => merged.push((u, mx, mn)),
            }
        }
        PsiState {
            entries: merged,
            hit_zero: p.hit_zero,
        }
    }
}

fn cell(node: &CondNode, track_bounds: bool) -> SupportCell {
    let objective = node
        .phis
        .iter()
        .map(|(p, m)| m * reduce(p, Aggregate::Sup))
        .sum();
    if !track_bounds {
        return SupportCell {
            objective,
            lower: 0.0,
            upper: 1.0,
        };
    }
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (p, m) in &node.psis {
        upper += m * p.entries.iter().map(|e| e.1).fold(0.0, f64::max);
        if !p.hit_zero {
            lower += m * p.entries.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
        }
    }
    SupportCell {
        objective,
        lower,
        upper,
    }
}
