//! Unconstrained quadratic form of the problem.
//!
//! The energy of a bit vector is the objective plus `rho` times a penalty `g`
//! that is zero exactly on feasible vectors:
//!
//! ```text
//! g = sum_r (sum_w x - sum_p y)^2          balance of working and protection
//!   + sum_r (sum_w x) (sum_w x - 1)        at most one working lightpath
//!   + sum over conflict tuples of the product of their two bits
//! ```
//!
//! Squares are expanded with `b * b = b`, so every coefficient is an integer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::conflicts::{ConflictClass, ConflictSets};
use crate::error::{Error, Result};
use crate::instance::{Instance, Kind, Solution};
use crate::oracle::MaskModel;
use crate::weights::Weights;

/// Penalty coefficient per constraint family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PenaltyWeights {
    pub balance: i64,
    pub single_working: i64,
    pub c1: i64,
    pub c2: i64,
    pub c3: i64,
    pub c4: i64,
}

impl PenaltyWeights {
    pub fn uniform(rho: i64) -> Self {
        Self { balance: rho, single_working: rho, c1: rho, c2: rho, c3: rho, c4: rho }
    }

    fn conflict(&self, class: ConflictClass) -> i64 {
        match class {
            ConflictClass::C1 => self.c1,
            ConflictClass::C2 => self.c2,
            ConflictClass::C3 => self.c3,
            ConflictClass::C4 => self.c4,
        }
    }

    fn largest(&self) -> i64 {
        [self.balance, self.single_working, self.c1, self.c2, self.c3, self.c4].into_iter().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuboModel {
    n: usize,
    linear: Vec<i64>,
    quadratic: BTreeMap<(usize, usize), i64>,
    constant: i64,
    alpha: i64,
    beta: i64,
    penalties: PenaltyWeights,
    adjacency: Vec<Vec<(usize, i64)>>,
}

impl QuboModel {
    /// A bare quadratic form. Keys of `quadratic` are normalised to `i < j`
    /// and duplicate or mirrored entries are summed.
    pub fn from_parts(linear: Vec<i64>, quadratic: impl IntoIterator<Item = ((usize, usize), i64)>, constant: i64) -> Result<Self> {
        let n = linear.len();
        let mut map = BTreeMap::new();
        for ((i, j), c) in quadratic {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { index: i.max(j), len: n });
            }
            if i == j {
                return Err(Error::InvalidConfig(format!("quadratic entry ({i}, {i}) belongs in the linear part")));
            }
            *map.entry((i.min(j), i.max(j))).or_insert(0) += c;
        }
        Ok(Self::assemble(linear, map, constant, 0, 0, PenaltyWeights::uniform(0)))
    }

    fn assemble(
        linear: Vec<i64>,
        mut quadratic: BTreeMap<(usize, usize), i64>,
        constant: i64,
        alpha: i64,
        beta: i64,
        penalties: PenaltyWeights,
    ) -> Self {
        quadratic.retain(|_, c| *c != 0);
        let n = linear.len();
        let mut adjacency = vec![Vec::new(); n];
        for (&(i, j), &c) in &quadratic {
            adjacency[i].push((j, c));
            adjacency[j].push((i, c));
        }
        Self { n, linear, quadratic, constant, alpha, beta, penalties, adjacency }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linear(&self) -> &[i64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), i64> {
        &self.quadratic
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn alpha(&self) -> i64 {
        self.alpha
    }

    pub fn beta(&self) -> i64 {
        self.beta
    }

    pub fn penalties(&self) -> PenaltyWeights {
        self.penalties
    }

    /// The largest penalty coefficient; equals the common value for uniform penalties.
    pub fn rho(&self) -> i64 {
        self.penalties.largest()
    }

    /// Incident quadratic terms of `var` as `(other, coefficient)`.
    pub fn neighbors(&self, var: usize) -> &[(usize, i64)] {
        &self.adjacency[var]
    }

    /// Largest absolute coefficient, or 1 for an all-zero model.
    pub fn max_abs_coefficient(&self) -> i64 {
        self.linear
            .iter()
            .chain(self.quadratic.values())
            .map(|c| c.abs())
            .max()
            .unwrap_or(0)
            .max(1)
    }

    fn check_len(&self, bits: &[bool]) -> Result<()> {
        if bits.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: bits.len() });
        }
        Ok(())
    }

    pub fn energy(&self, bits: &[bool]) -> Result<i64> {
        self.check_len(bits)?;
        let linear: i64 = (0..self.n).filter(|&i| bits[i]).map(|i| self.linear[i]).sum();
        let quadratic: i64 = self.quadratic.iter().filter(|((i, j), _)| bits[*i] && bits[*j]).map(|(_, c)| c).sum();
        Ok(self.constant + linear + quadratic)
    }

    /// `linear[var]` plus the incident quadratic coefficients whose other bit is set.
    pub fn local_field(&self, bits: &[bool], var: usize) -> i64 {
        self.linear[var] + self.adjacency[var].iter().filter(|(j, _)| bits[*j]).map(|(_, c)| c).sum::<i64>()
    }

    /// Energy change from flipping `var`.
    pub fn flip_delta(&self, bits: &[bool], var: usize) -> Result<i64> {
        self.check_len(bits)?;
        if var >= self.n {
            return Err(Error::IndexOutOfRange { index: var, len: self.n });
        }
        let field = self.local_field(bits, var);
        Ok(if bits[var] { -field } else { field })
    }

    /// Plain-text sparse form: a header `n constant`, then `i j coefficient`
    /// lines sorted by `(i, j)`, with `i == j` for linear terms.
    pub fn to_text(&self) -> String {
        let mut entries: Vec<(usize, usize, i64)> = self
            .linear
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, i, c))
            .chain(self.quadratic.iter().map(|(&(i, j), &c)| (i, j, c)))
            .collect();
        entries.sort_unstable();
        let mut out = format!("{} {}\n", self.n, self.constant);
        for (i, j, c) in entries {
            writeln!(out, "{i} {j} {c}").expect("writing to a string");
        }
        out
    }
}

/// Builds the model with one penalty coefficient for every constraint family.
pub fn build_qubo(instance: &Instance, conflicts: &ConflictSets, weights: &Weights, rho: i64) -> QuboModel {
    build_qubo_with(instance, conflicts, weights, PenaltyWeights::uniform(rho))
}

pub fn build_qubo_with(
    instance: &Instance,
    conflicts: &ConflictSets,
    weights: &Weights,
    penalties: PenaltyWeights,
) -> QuboModel {
    let n = instance.var_count();
    let mut linear: Vec<i64> = (0..n)
        .map(|v| {
            weights.alpha * instance.length(v) - if instance.var(v).kind == Kind::Working { weights.beta } else { 0 }
        })
        .collect();
    let mut quadratic: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut add = |a: usize, b: usize, c: i64| *quadratic.entry((a.min(b), a.max(b))).or_insert(0) += c;

    for r in 0..instance.request_count() {
        let working: Vec<usize> = instance.working_vars(r).collect();
        let protection: Vec<usize> = instance.protection_vars(r).collect();
        for &v in working.iter().chain(&protection) {
            linear[v] += penalties.balance;
        }
        for side in [&working, &protection] {
            for (i, &a) in side.iter().enumerate() {
                for &b in &side[i + 1..] {
                    add(a, b, 2 * penalties.balance);
                }
            }
        }
        for &w in &working {
            for &p in &protection {
                add(w, p, -2 * penalties.balance);
            }
        }
        for (i, &a) in working.iter().enumerate() {
            for &b in &working[i + 1..] {
                add(a, b, 2 * penalties.single_working);
            }
        }
    }
    for (a, b, class) in conflicts.var_pairs(instance) {
        add(a, b, penalties.conflict(class));
    }

    QuboModel::assemble(linear, quadratic, 0, weights.alpha, weights.beta, penalties)
}

/// Values of the individual penalty terms for one bit vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PenaltyBreakdown {
    pub balance: i64,
    pub single_working: i64,
    pub c1: i64,
    pub c2: i64,
    pub c3: i64,
    pub c4: i64,
    pub total: i64,
}

impl PenaltyBreakdown {
    /// Penalty energy under per-family coefficients.
    pub fn weighted(&self, penalties: &PenaltyWeights) -> i64 {
        penalties.balance * self.balance
            + penalties.single_working * self.single_working
            + penalties.c1 * self.c1
            + penalties.c2 * self.c2
            + penalties.c3 * self.c3
            + penalties.c4 * self.c4
    }
}

/// Evaluates each penalty term directly from the constraint definitions.
pub fn penalty(instance: &Instance, conflicts: &ConflictSets, solution: &Solution) -> Result<PenaltyBreakdown> {
    if solution.len() != instance.var_count() {
        return Err(Error::Dimension { expected: instance.var_count(), got: solution.len() });
    }
    let mut out = PenaltyBreakdown::default();
    for r in 0..instance.request_count() {
        let working = instance.working_vars(r).filter(|&v| solution.get(v)).count() as i64;
        let protection = instance.protection_vars(r).filter(|&v| solution.get(v)).count() as i64;
        out.balance += (working - protection).pow(2);
        out.single_working += working * (working - 1);
    }
    for (a, b, class) in conflicts.var_pairs(instance) {
        if solution.get(a) && solution.get(b) {
            match class {
                ConflictClass::C1 => out.c1 += 1,
                ConflictClass::C2 => out.c2 += 1,
                ConflictClass::C3 => out.c3 += 1,
                ConflictClass::C4 => out.c4 += 1,
            }
        }
    }
    out.total = out.balance + out.single_working + out.c1 + out.c2 + out.c3 + out.c4;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RhoBase {
    /// Smallest integer strictly above `bound`, at least 1.
    pub value: i64,
    pub bound: i64,
    /// The bound was below zero and the value was raised to 1.
    pub clamped: bool,
}

/// Penalty coefficient that makes every infeasible vector worse than every
/// feasible one:
/// `rho > beta * (|R| + 1) - alpha * (1 + sum_r (shortest working + shortest protection))`,
/// where ungrantable requests add nothing to the sum.
pub fn rho_base(instance: &Instance, weights: &Weights) -> RhoBase {
    let shortest: i64 = instance
        .requests()
        .iter()
        .filter(|r| r.is_grantable())
        .map(|r| {
            let min = |paths: &[crate::instance::Lightpath]| paths.iter().map(|p| p.length()).min().unwrap_or(0);
            min(&r.working) + min(&r.protection)
        })
        .sum();
    let bound = weights.beta * (instance.request_count() as i64 + 1) - weights.alpha * (1 + shortest);
    let value = (bound + 1).max(1);
    RhoBase { value, bound, clamped: bound + 1 < 1 }
}

/// The penalty coefficient used by default for annealing, `beta + 100`.
pub fn default_rho(weights: &Weights) -> i64 {
    weights.beta + 100
}

/// Smallest integer `rho >= 1` for which every infeasible vector has energy
/// strictly above every feasible vector, found by enumeration. `None` when all
/// vectors are feasible.
pub fn smallest_separating_rho(
    instance: &Instance,
    conflicts: &ConflictSets,
    weights: &Weights,
    cap: usize,
) -> Result<Option<i64>> {
    let model = MaskModel::new(instance, conflicts, cap)?;
    let n = instance.var_count();
    let mut feasible_max = i64::MIN;
    model.for_each_feasible(|_, fa, fb| feasible_max = feasible_max.max(weights.alpha * fa - weights.beta * fb));
    let mut needed: Option<i64> = None;
    for mask in 0..(1u64 << n) {
        if model.is_feasible(mask) {
            continue;
        }
        let sol = Solution::from_mask(mask, n);
        let g = penalty(instance, conflicts, &sol)?.total;
        let objective = weights.alpha * model.f_alpha(mask) - weights.beta * model.f_beta(mask);
        let rho = (feasible_max - objective).div_euclid(g) + 1;
        needed = Some(needed.map_or(rho, |r| r.max(rho)));
    }
    Ok(needed.map(|r| r.max(1)))
}
