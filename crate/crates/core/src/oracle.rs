//! Exact solvers used as ground truth: exhaustive enumeration for tiny
//! instances and a depth-first branch-and-bound that propagates the grouped
//! exclusions.

use std::cmp::Ordering;

use crate::conflicts::{ConflictSets, StrongGroups};
use crate::error::{Error, Result};
use crate::instance::{Instance, Kind, Solution};
use crate::qubo::QuboModel;
use crate::report::{Method, SolveReport, SolveStatus};
use crate::weights::Weights;

/// Default largest variable count accepted by the enumerators.
pub const ENUMERATION_CAP: usize = 24;

/// Bit-mask form of the feasibility rules for instances with at most 63 variables.
///
/// Bit `i` of a mask is variable `i`.
#[derive(Clone, Debug)]
pub struct MaskModel {
    n: usize,
    working: Vec<u64>,
    protection: Vec<u64>,
    conflicts: Vec<u64>,
    lengths: Vec<i64>,
    working_bits: u64,
}

impl MaskModel {
    pub fn new(instance: &Instance, conflicts: &ConflictSets, cap: usize) -> Result<Self> {
        let n = instance.var_count();
        if n > cap.min(63) {
            return Err(Error::EnumerationLimit { vars: n, cap: cap.min(63) });
        }
        let range_mask = |range: std::ops::Range<usize>| range.fold(0u64, |m, v| m | 1 << v);
        let working: Vec<u64> = (0..instance.request_count()).map(|r| range_mask(instance.working_vars(r))).collect();
        let protection = (0..instance.request_count()).map(|r| range_mask(instance.protection_vars(r))).collect();
        let mut conflict_masks = vec![0u64; n];
        for (a, b, _) in conflicts.var_pairs(instance) {
            conflict_masks[a] |= 1 << b;
            conflict_masks[b] |= 1 << a;
        }
        let working_bits = working.iter().fold(0, |m, w| m | w);
        Ok(Self {
            n,
            working,
            protection,
            conflicts: conflict_masks,
            lengths: (0..n).map(|v| instance.length(v)).collect(),
            working_bits,
        })
    }

    pub fn var_count(&self) -> usize {
        self.n
    }

    pub fn is_feasible(&self, mask: u64) -> bool {
        for (w, p) in self.working.iter().zip(&self.protection) {
            let selected = (mask & w).count_ones();
            if selected > 1 || selected != (mask & p).count_ones() {
                return false;
            }
        }
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            if mask & self.conflicts[v] != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }

    pub fn f_alpha(&self, mask: u64) -> i64 {
        let mut rest = mask;
        let mut total = 0;
        while rest != 0 {
            total += self.lengths[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        total
    }

    pub fn f_beta(&self, mask: u64) -> i64 {
        (mask & self.working_bits).count_ones() as i64
    }

    /// Calls `visit(mask, f_alpha, f_beta)` for every feasible mask in increasing mask order.
    pub fn for_each_feasible(&self, mut visit: impl FnMut(u64, i64, i64)) {
        for mask in 0..(1u64 << self.n) {
            if self.is_feasible(mask) {
                visit(mask, self.f_alpha(mask), self.f_beta(mask));
            }
        }
    }
}

/// Orders two masks by their bit strings, variable 0 first.
pub fn mask_lex_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let first_difference = (a ^ b).trailing_zeros();
    if a >> first_difference & 1 == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Minimum objective over all feasible vectors.
///
/// Ties prefer fewer links, then the lexicographically smallest bit string.
pub fn brute_force_ip(instance: &Instance, conflicts: &ConflictSets, weights: &Weights) -> Result<SolveReport> {
    brute_force_ip_capped(instance, conflicts, weights, ENUMERATION_CAP)
}

pub fn brute_force_ip_capped(
    instance: &Instance,
    conflicts: &ConflictSets,
    weights: &Weights,
    cap: usize,
) -> Result<SolveReport> {
    let model = MaskModel::new(instance, conflicts, cap)?;
    let mut best: Option<(i64, i64, u64)> = None;
    let mut visited = 0u64;
    model.for_each_feasible(|mask, fa, fb| {
        visited += 1;
        let objective = weights.alpha * fa - weights.beta * fb;
        let better = match best {
            None => true,
            Some((bo, bf, bm)) => (objective, fa).cmp(&(bo, bf)).then_with(|| mask_lex_cmp(mask, bm)) == Ordering::Less,
        };
        if better {
            best = Some((objective, fa, mask));
        }
    });
    let (_, _, mask) = best.expect("the empty selection is always feasible");
    let solution = Solution::from_mask(mask, model.var_count());
    let mut report = SolveReport::evaluate(Method::Exact, instance, conflicts, solution, weights)?;
    report.status = SolveStatus::Optimal;
    report.lower_bound = Some(report.objective);
    report.work = visited;
    Ok(report)
}

/// Global minimum of a QUBO by Gray-code enumeration, ties broken by the
/// lexicographically smallest bit string.
pub fn brute_force_qubo(qubo: &QuboModel) -> Result<(Vec<bool>, i64)> {
    brute_force_qubo_capped(qubo, ENUMERATION_CAP)
}

pub fn brute_force_qubo_capped(qubo: &QuboModel, cap: usize) -> Result<(Vec<bool>, i64)> {
    let n = qubo.n();
    if n > cap.min(63) {
        return Err(Error::EnumerationLimit { vars: n, cap: cap.min(63) });
    }
    let mut bits = vec![false; n];
    let mut mask = 0u64;
    let mut energy = qubo.constant();
    let (mut best_mask, mut best_energy) = (0u64, energy);
    for step in 1..(1u64 << n) {
        let flip = step.trailing_zeros() as usize;
        energy += qubo.flip_delta(&bits, flip)?;
        bits[flip] = !bits[flip];
        mask ^= 1 << flip;
        if energy < best_energy || (energy == best_energy && mask_lex_cmp(mask, best_mask) == Ordering::Less) {
            best_energy = energy;
            best_mask = mask;
        }
    }
    Ok((Solution::from_mask(best_mask, n).into_bits(), best_energy))
}

struct PairChoice {
    working: usize,
    protection: usize,
    length: i64,
}

struct Search<'a> {
    instance: &'a Instance,
    weights: &'a Weights,
    order: Vec<usize>,
    options: Vec<Vec<PairChoice>>,
    exclusions: Vec<Vec<usize>>,
    blocked: Vec<u32>,
    bits: Vec<bool>,
    objective: i64,
    links: i64,
    incumbent: (i64, i64, Vec<bool>),
    nodes: u64,
    node_limit: Option<u64>,
    open_bound: Option<i64>,
}

impl Search<'_> {
    fn gain(&self, option: &PairChoice) -> i64 {
        self.weights.alpha * option.length - self.weights.beta
    }

    fn available(&self, option: &PairChoice) -> bool {
        self.blocked[option.working] == 0 && self.blocked[option.protection] == 0
    }

    fn bound(&self, depth: usize) -> i64 {
        let optimistic: i64 = self.order[depth..]
            .iter()
            .map(|&r| {
                self.options[r]
                    .iter()
                    .filter(|o| self.available(o))
                    .map(|o| self.gain(o))
                    .min()
                    .map_or(0, |g| g.min(0))
            })
            .sum();
        self.objective + optimistic
    }

    fn select(&mut self, var: usize, on: bool) {
        self.bits[var] = on;
        let step: i64 = if on { 1 } else { -1 };
        let coef = self.weights.alpha * self.instance.length(var)
            - if self.instance.var(var).kind == Kind::Working { self.weights.beta } else { 0 };
        self.objective += step * coef;
        self.links += step * self.instance.length(var);
        for i in 0..self.exclusions[var].len() {
            let other = self.exclusions[var][i];
            if on {
                self.blocked[other] += 1;
            } else {
                self.blocked[other] -= 1;
            }
        }
    }

    fn descend(&mut self, depth: usize) {
        let bound = self.bound(depth);
        if self.node_limit.is_some_and(|limit| self.nodes >= limit) {
            self.open_bound = Some(self.open_bound.map_or(bound, |b| b.min(bound)));
            return;
        }
        self.nodes += 1;
        if bound >= self.incumbent.0 {
            return;
        }
        if depth == self.order.len() {
            let candidate = (self.objective, self.links);
            if (candidate.0, candidate.1).cmp(&(self.incumbent.0, self.incumbent.1)).then_with(|| self.bits.cmp(&self.incumbent.2))
                == Ordering::Less
            {
                self.incumbent = (candidate.0, candidate.1, self.bits.clone());
            }
            return;
        }
        let request = self.order[depth];
        for i in 0..self.options[request].len() {
            let (w, p) = (self.options[request][i].working, self.options[request][i].protection);
            if self.blocked[w] != 0 || self.blocked[p] != 0 {
                continue;
            }
            self.select(w, true);
            if self.blocked[p] == 0 {
                self.select(p, true);
                self.descend(depth + 1);
                self.select(p, false);
            }
            self.select(w, false);
        }
        self.descend(depth + 1);
    }
}

/// Depth-first branch-and-bound over requests.
///
/// Each request either takes one non-overlapping working/protection pair or
/// stays idle. Selecting a lightpath blocks every variable it shares a group
/// with. The bound adds, for each remaining request, the most negative gain
/// among its still available pairs. With `node_limit = None` the search is
/// exact; otherwise the report carries the incumbent and a proven lower bound.
pub fn branch_and_bound(
    instance: &Instance,
    groups: &StrongGroups,
    weights: &Weights,
    node_limit: Option<u64>,
) -> Result<SolveReport> {
    let exclusions = groups.exclusions(instance);
    let options: Vec<Vec<PairChoice>> = (0..instance.request_count())
        .map(|r| {
            let mut list: Vec<PairChoice> = instance
                .working_vars(r)
                .flat_map(|w| instance.protection_vars(r).map(move |p| (w, p)))
                .filter(|&(w, p)| exclusions[w].binary_search(&p).is_err())
                .map(|(w, p)| PairChoice { working: w, protection: p, length: instance.length(w) + instance.length(p) })
                .collect();
            list.sort_by_key(|o| (o.length, o.working, o.protection));
            list
        })
        .collect();

    let mut order: Vec<usize> = (0..instance.request_count()).filter(|&r| !options[r].is_empty()).collect();
    let best_gain = |r: usize| weights.beta - weights.alpha * options[r][0].length;
    order.sort_by_key(|&r| (std::cmp::Reverse(best_gain(r)), r));

    let n = instance.var_count();
    let mut search = Search {
        instance,
        weights,
        order,
        options,
        exclusions,
        blocked: vec![0; n],
        bits: vec![false; n],
        objective: 0,
        links: 0,
        incumbent: (0, 0, vec![false; n]),
        nodes: 0,
        node_limit,
        open_bound: None,
    };
    search.descend(0);

    let incumbent = search.incumbent.0;
    let (status, lower_bound) = match search.open_bound {
        None => (SolveStatus::Optimal, incumbent),
        Some(bound) => (SolveStatus::NodeLimit, bound.min(incumbent)),
    };
    let conflicts = crate::conflicts::build_conflict_sets(instance);
    let mut report =
        SolveReport::evaluate(Method::BranchAndBound, instance, &conflicts, Solution::new(search.incumbent.2), weights)?;
    report.status = status;
    report.lower_bound = Some(lower_bound);
    report.work = search.nodes;
    Ok(report)
}
