//! Parallel-trial annealing with a dynamic offset and replica exchange.
//!
//! Each iteration a replica evaluates the energy change of every single-bit
//! flip, marks each flip as a candidate with its Metropolis probability
//! (shifted down by the current offset), and applies one candidate chosen
//! uniformly. When no flip qualifies the offset grows by a fixed increment;
//! any accepted flip resets it to zero.
//!
//! In tempering mode the replicas sit on a fixed geometric temperature ladder
//! and neighbouring replicas try to swap states every `exchange_interval`
//! iterations. In single mode every replica follows its own geometric cooling
//! schedule and no exchanges happen.
//!
//! Every replica draws from its own stream keyed by `(seed, replica)` and
//! every exchange round from a stream keyed by `(seed, round)`, so results are
//! identical for any number of worker threads.

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conflicts::build_conflict_sets;
use crate::error::{Error, Result};
use crate::instance::{verify_feasible, Instance, Kind, Solution, Violation};
use crate::qubo::{build_qubo, QuboModel};
use crate::report::{Method, SolveReport};
use crate::rng;
use crate::weights::Weights;

/// Above this scaled excess the acceptance probability is below `2^-53`,
/// the resolution of a uniform `f64` draw, so the draw is skipped. Without an
/// offset, draws use 32-bit thresholds looked up per integer excess instead.
const NEGLIGIBLE_EXPONENT: f64 = 37.0;

const TWO_POW_32: f64 = 4_294_967_296.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Single,
    Tempering,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnealConfig {
    pub iterations: u64,
    pub replicas: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub offset_increment: f64,
    pub exchange_interval: u64,
    pub seed: u64,
    pub mode: Mode,
    /// Worker threads; `None` uses the ambient rayon pool. Results do not depend on it.
    pub threads: Option<usize>,
}

impl AnnealConfig {
    /// Defaults scaled to the model: 8 tempering replicas between `rho` and 1,
    /// an offset step of `rho / 100` (at least 1), and exchanges every 100 iterations.
    /// Models without penalties use their largest coefficient in place of `rho`.
    pub fn for_qubo(qubo: &QuboModel, iterations: u64, seed: u64) -> Self {
        let scale = if qubo.rho() > 0 { qubo.rho() } else { qubo.max_abs_coefficient() } as f64;
        Self {
            iterations,
            replicas: 8,
            t_min: 1.0,
            t_max: scale.max(1.0),
            offset_increment: (scale / 100.0).max(1.0),
            exchange_interval: 100,
            seed,
            mode: Mode::Tempering,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.replicas == 0 {
            return bad("replicas must be at least 1");
        }
        if self.exchange_interval == 0 {
            return bad("exchange interval must be at least 1");
        }
        if !(self.t_min > 0.0 && self.t_min <= self.t_max && self.t_max.is_finite()) {
            return bad("temperatures must satisfy 0 < t_min <= t_max");
        }
        if !(self.offset_increment >= 0.0 && self.offset_increment.is_finite()) {
            return bad("offset increment must be non-negative");
        }
        if self.threads == Some(0) {
            return bad("thread count must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub best_energy: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnnealResult {
    pub best_bits: Vec<bool>,
    pub best_energy: i64,
    /// Best-so-far energy over all replicas, one point per improvement.
    pub trace: Vec<TracePoint>,
    pub accepted_flips: u64,
    pub offset_activations: u64,
    pub exchanges: u64,
}

/// `t_max * (t_min / t_max)^(step / (steps - 1))`.
fn geometric(t_max: f64, t_min: f64, step: u64, steps: u64) -> f64 {
    if steps <= 1 {
        return t_min;
    }
    t_max * (t_min / t_max).powf(step as f64 / (steps - 1) as f64)
}

struct Replica {
    bits: Vec<bool>,
    field: Vec<i64>,
    energy: i64,
    offset: f64,
    rng: ChaCha8Rng,
    best_bits: Vec<bool>,
    best_energy: i64,
    best_iteration: u64,
    improvements: Vec<TracePoint>,
    accepted: u64,
    offset_hits: u64,
    candidates: Vec<usize>,
    /// `exp(-k / t)` in units of `2^-32` for integer excess `k`, valid
    /// while the offset is zero. Ends before the first entry that rounds to 0.
    boltzmann: Vec<u64>,
    boltzmann_t: f64,
}

impl Replica {
    fn new(qubo: &QuboModel, seed: u64, id: usize) -> Self {
        let n = qubo.n();
        let bits = vec![false; n];
        let energy = qubo.constant();
        Self {
            field: qubo.linear().to_vec(),
            best_bits: bits.clone(),
            bits,
            energy,
            offset: 0.0,
            rng: rng::stream(seed, rng::REPLICA, id as u64),
            best_energy: energy,
            best_iteration: 0,
            improvements: Vec::new(),
            accepted: 0,
            offset_hits: 0,
            candidates: Vec::with_capacity(n),
            boltzmann: Vec::new(),
            boltzmann_t: f64::NAN,
        }
    }

    fn step(&mut self, qubo: &QuboModel, temperature: f64, offset_increment: f64, iteration: u64) {
        self.candidates.clear();
        let inv_t = 1.0 / temperature;
        let offset = self.offset;
        let draw_limit = offset + NEGLIGIBLE_EXPONENT * temperature;
        if offset == 0.0 {
            if self.boltzmann_t != temperature {
                self.boltzmann = (0..)
                    .map(|k| ((-(k as f64) * inv_t).exp() * TWO_POW_32).round() as u64)
                    .take_while(|&threshold| threshold > 0)
                    .collect();
                self.boltzmann_t = temperature;
            }
            for (i, (&bit, &field)) in self.bits.iter().zip(&self.field).enumerate() {
                let delta = if bit { -field } else { field };
                if delta <= 0 {
                    self.candidates.push(i);
                } else if let Some(&threshold) = self.boltzmann.get(delta as usize) {
                    if u64::from(self.rng.next_u32()) < threshold {
                        self.candidates.push(i);
                    }
                }
            }
        } else {
            for (i, (&bit, &field)) in self.bits.iter().zip(&self.field).enumerate() {
                let delta = (if bit { -field } else { field }) as f64;
                if delta <= offset {
                    self.candidates.push(i);
                } else if delta <= draw_limit && self.rng.gen::<f64>() < (-(delta - offset) * inv_t).exp() {
                    self.candidates.push(i);
                }
            }
        }

        if self.candidates.is_empty() {
            self.offset += offset_increment;
            self.offset_hits += 1;
            return;
        }
        let chosen = self.candidates[self.rng.gen_range(0..self.candidates.len())];
        self.flip(qubo, chosen);
        self.offset = 0.0;
        self.accepted += 1;
        if self.energy < self.best_energy {
            self.best_energy = self.energy;
            self.best_bits.copy_from_slice(&self.bits);
            self.best_iteration = iteration;
            self.improvements.push(TracePoint { iteration, best_energy: self.energy });
        }
    }

    fn flip(&mut self, qubo: &QuboModel, var: usize) {
        let turning_on = !self.bits[var];
        let field = self.field[var];
        self.energy += if turning_on { field } else { -field };
        self.bits[var] = turning_on;
        for &(other, c) in qubo.neighbors(var) {
            self.field[other] += if turning_on { c } else { -c };
        }
    }

    fn run(&mut self, qubo: &QuboModel, config: &AnnealConfig, temperatures: &Temperatures, from: u64, to: u64) {
        for iteration in from..to {
            let t = temperatures.at(iteration);
            self.step(qubo, t, config.offset_increment, iteration + 1);
            if cfg!(debug_assertions) && iteration % 1024 == 0 {
                debug_assert_eq!(self.energy, qubo.energy(&self.bits).expect("replica length"));
            }
        }
    }
}

/// Temperature source for one replica.
#[derive(Clone, Copy)]
enum Temperatures {
    Fixed(f64),
    Cooling { t_max: f64, t_min: f64, iterations: u64 },
}

impl Temperatures {
    fn at(&self, iteration: u64) -> f64 {
        match *self {
            Temperatures::Fixed(t) => t,
            Temperatures::Cooling { t_max, t_min, iterations } => geometric(t_max, t_min, iteration, iterations),
        }
    }
}

/// Minimises `qubo` starting every replica from the all-zero vector.
pub fn anneal(qubo: &QuboModel, config: &AnnealConfig) -> Result<AnnealResult> {
    config.validate()?;
    if qubo.n() == 0 {
        let energy = qubo.constant();
        return Ok(AnnealResult {
            best_bits: Vec::new(),
            best_energy: energy,
            trace: vec![TracePoint { iteration: 0, best_energy: energy }],
            accepted_flips: 0,
            offset_activations: 0,
            exchanges: 0,
        });
    }
    match config.threads {
        Some(threads) if threads > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| run_replicas(qubo, config, true)),
        Some(_) => run_replicas(qubo, config, false),
        None => run_replicas(qubo, config, true),
    }
}

fn run_replicas(qubo: &QuboModel, config: &AnnealConfig, parallel: bool) -> Result<AnnealResult> {
    let count = config.replicas;
    let tempering = config.mode == Mode::Tempering && count > 1;
    let ladder: Vec<Temperatures> = (0..count)
        .map(|k| {
            if tempering {
                Temperatures::Fixed(geometric(config.t_max, config.t_min, k as u64, count as u64))
            } else {
                Temperatures::Cooling { t_max: config.t_max, t_min: config.t_min, iterations: config.iterations }
            }
        })
        .collect();
    let mut replicas: Vec<Replica> = (0..count).map(|k| Replica::new(qubo, config.seed, k)).collect();

    let segment = if tempering { config.exchange_interval } else { config.iterations.max(1) };
    let mut exchanges = 0u64;
    let mut start = 0u64;
    let mut round = 0u64;
    while start < config.iterations {
        let end = (start + segment).min(config.iterations);
        let work = |(k, replica): (usize, &mut Replica)| replica.run(qubo, config, &ladder[k], start, end);
        if parallel {
            replicas.par_iter_mut().enumerate().for_each(work);
        } else {
            replicas.iter_mut().enumerate().for_each(work);
        }
        if tempering && end < config.iterations {
            exchanges += exchange_round(&mut replicas, &ladder, config.seed, round);
        }
        round += 1;
        start = end;
    }

    let initial = qubo.constant();
    let best = replicas
        .iter()
        .enumerate()
        .min_by_key(|(k, r)| (r.best_energy, r.best_iteration, *k))
        .map(|(_, r)| r)
        .expect("at least one replica");

    let mut points: Vec<TracePoint> = replicas.iter().flat_map(|r| r.improvements.iter().copied()).collect();
    points.sort_by_key(|p| p.iteration);
    let mut trace = vec![TracePoint { iteration: 0, best_energy: initial }];
    for p in points {
        if p.best_energy < trace.last().expect("non-empty").best_energy {
            trace.push(p);
        }
    }

    Ok(AnnealResult {
        best_bits: best.best_bits.clone(),
        best_energy: best.best_energy,
        trace,
        accepted_flips: replicas.iter().map(|r| r.accepted).sum(),
        offset_activations: replicas.iter().map(|r| r.offset_hits).sum(),
        exchanges,
    })
}

/// Attempts swaps between every pair of neighbouring ladder rungs, hottest first.
fn exchange_round(replicas: &mut [Replica], ladder: &[Temperatures], seed: u64, round: u64) -> u64 {
    let mut rng = rng::stream(seed, rng::EXCHANGE, round);
    let mut swaps = 0;
    for k in 0..replicas.len() - 1 {
        let (ti, tj) = (ladder[k].at(0), ladder[k + 1].at(0));
        let (ei, ej) = (replicas[k].energy, replicas[k + 1].energy);
        let exponent = (1.0 / ti - 1.0 / tj) * (ei - ej) as f64;
        let u: f64 = rng.gen();
        if exponent >= 0.0 || u < exponent.exp() {
            let (left, right) = replicas.split_at_mut(k + 1);
            swap_state(&mut left[k], &mut right[0]);
            swaps += 1;
        }
    }
    swaps
}

fn swap_state(a: &mut Replica, b: &mut Replica) {
    std::mem::swap(&mut a.bits, &mut b.bits);
    std::mem::swap(&mut a.field, &mut b.field);
    std::mem::swap(&mut a.energy, &mut b.energy);
}

/// Builds the QUBO, anneals it and decodes the best state.
///
/// An infeasible decoded state is repaired by repeatedly clearing the set bit,
/// among those involved in a violation, whose removal raises the objective
/// least (ties go to the lowest index).
pub fn solve_rwap_da(instance: &Instance, weights: &Weights, rho: i64, config: &AnnealConfig) -> Result<SolveReport> {
    solve_rwap_da_detailed(instance, weights, rho, config).map(|(report, _)| report)
}

/// Like [`solve_rwap_da`], also returning the raw annealer result with its trace.
pub fn solve_rwap_da_detailed(
    instance: &Instance,
    weights: &Weights,
    rho: i64,
    config: &AnnealConfig,
) -> Result<(SolveReport, AnnealResult)> {
    let conflicts = build_conflict_sets(instance);
    let qubo = build_qubo(instance, &conflicts, weights, rho);
    let result = anneal(&qubo, config)?;
    let mut solution = Solution::new(result.best_bits.clone());
    if solution.is_empty() {
        solution = Solution::zeros(instance.var_count());
    }

    let mut repaired = false;
    loop {
        let verdict = verify_feasible(instance, &conflicts, &solution)?;
        if verdict.is_feasible() {
            break;
        }
        repaired = true;
        let involved = violation_vars(instance, &solution, &verdict.violations);
        let coefficient = |v: usize| {
            weights.alpha * instance.length(v) - if instance.var(v).kind == Kind::Working { weights.beta } else { 0 }
        };
        let clear = involved
            .into_iter()
            .min_by_key(|&v| (-coefficient(v), v))
            .expect("a violation involves at least one set bit");
        solution.set(clear, false);
    }

    let mut report = SolveReport::evaluate(Method::Da, instance, &conflicts, solution, weights)?;
    report.repaired = repaired;
    report.energy = Some(result.best_energy);
    report.work = config.iterations;
    Ok((report, result))
}

fn violation_vars(instance: &Instance, solution: &Solution, violations: &[Violation]) -> Vec<usize> {
    let idx = |r, kind, i| instance.var_index(r, kind, i).expect("violation within instance");
    let mut vars = Vec::new();
    for v in violations {
        match *v {
            Violation::Balance { request, .. } => {
                vars.extend(instance.working_vars(request).chain(instance.protection_vars(request)).filter(|&x| solution.get(x)));
            }
            Violation::MultipleWorking { request, .. } => {
                vars.extend(instance.working_vars(request).filter(|&x| solution.get(x)));
            }
            Violation::C1 { request, working, protection } => {
                vars.push(idx(request, Kind::Working, working));
                vars.push(idx(request, Kind::Protection, protection));
            }
            Violation::C2 { request, other, working, protection } => {
                vars.push(idx(request, Kind::Working, working));
                vars.push(idx(other, Kind::Protection, protection));
            }
            Violation::C3 { first, second, working_first, working_second } => {
                vars.push(idx(first, Kind::Working, working_first));
                vars.push(idx(second, Kind::Working, working_second));
            }
            Violation::C4 { first, second, protection_first, protection_second } => {
                vars.push(idx(first, Kind::Protection, protection_first));
                vars.push(idx(second, Kind::Protection, protection_second));
            }
        }
    }
    vars.sort_unstable();
    vars.dedup();
    vars
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::fixtures::figure_one;
    use crate::oracle::brute_force_qubo;
    use crate::weights::{beta_base, tight_example};
    use proptest::prelude::*;

    fn tight_qubo() -> QuboModel {
        let inst = tight_example(2, 3).unwrap();
        build_qubo(&inst, &build_conflict_sets(&inst), &Weights::explicit(1, 6), 7)
    }

    #[test]
    fn finds_tight_optimum() {
        let q = tight_qubo();
        for seed in 0..5 {
            let result = anneal(&q, &AnnealConfig::for_qubo(&q, 500, seed)).unwrap();
            assert_eq!(result.best_energy, -1);
            assert_eq!(result.best_bits, vec![true, true]);
        }
    }

    #[test]
    fn zero_model_is_immediately_optimal() {
        let q = QuboModel::from_parts(vec![0; 5], Vec::new(), 0).unwrap();
        let result = anneal(&q, &AnnealConfig::for_qubo(&q, 50, 1)).unwrap();
        assert_eq!(result.best_energy, 0);
        assert_eq!(result.trace, vec![TracePoint { iteration: 0, best_energy: 0 }]);
    }

    #[test]
    fn empty_model_returns_constant() {
        let q = QuboModel::from_parts(Vec::new(), Vec::new(), 4).unwrap();
        let result = anneal(&q, &AnnealConfig::for_qubo(&q, 50, 1)).unwrap();
        assert!(result.best_bits.is_empty());
        assert_eq!(result.best_energy, 4);
    }

    #[test]
    fn rejects_bad_config() {
        let q = tight_qubo();
        let mut config = AnnealConfig::for_qubo(&q, 10, 0);
        config.replicas = 0;
        assert!(anneal(&q, &config).is_err());
        let mut config = AnnealConfig::for_qubo(&q, 10, 0);
        config.t_min = 10.0 * config.t_max;
        assert!(anneal(&q, &config).is_err());
    }

    #[test]
    fn figure_one_da_grants_both() {
        let inst = figure_one();
        let w = beta_base(&inst, 1).unwrap();
        let rho = w.beta + 100;
        let q = build_qubo(&inst, &build_conflict_sets(&inst), &w, rho);
        let report = solve_rwap_da(&inst, &w, rho, &AnnealConfig::for_qubo(&q, 2000, 3)).unwrap();
        assert_eq!(report.granted, vec![0, 1]);
        assert_eq!(report.f_alpha, 8);
        assert!(report.feasible);
        assert!(!report.repaired);
    }

    #[test]
    fn tight_example_da_grants_one() {
        let inst = tight_example(2, 3).unwrap();
        let w = beta_base(&inst, 1).unwrap();
        let q = build_qubo(&inst, &build_conflict_sets(&inst), &w, w.beta + 100);
        let report = solve_rwap_da(&inst, &w, w.beta + 100, &AnnealConfig::for_qubo(&q, 1000, 0)).unwrap();
        assert_eq!(report.granted.len(), 1);
    }

    #[test]
    fn ungrantable_instance_grants_nothing() {
        let base = tight_example(2, 3).unwrap();
        let mut requests = base.requests().to_vec();
        requests[0].protection.clear();
        let inst = Instance::new(base.network().clone(), 1, requests).unwrap();
        let w = Weights::explicit(1, 6);
        let q = build_qubo(&inst, &build_conflict_sets(&inst), &w, 106);
        let report = solve_rwap_da(&inst, &w, 106, &AnnealConfig::for_qubo(&q, 300, 0)).unwrap();
        assert!(report.granted.is_empty());
        assert!(report.feasible);
    }

    #[test]
    fn repair_restores_feasibility_with_tiny_rho() {
        // With rho = 1 the balance penalty is cheaper than the grant reward,
        // so the raw optimum selects working lightpaths without protection.
        let inst = figure_one();
        let w = beta_base(&inst, 1).unwrap();
        let q = build_qubo(&inst, &build_conflict_sets(&inst), &w, 1);
        let (_, raw) = brute_force_qubo(&q).unwrap();
        assert!(raw < -14);
        let report = solve_rwap_da(&inst, &w, 1, &AnnealConfig::for_qubo(&q, 3000, 0)).unwrap();
        assert!(report.feasible);
        assert!(report.repaired);
    }

    #[test]
    fn single_mode_runs() {
        let q = tight_qubo();
        let mut config = AnnealConfig::for_qubo(&q, 800, 9);
        config.mode = Mode::Single;
        config.replicas = 2;
        assert_eq!(anneal(&q, &config).unwrap().best_energy, -1);
    }

    #[test]
    fn offset_grows_without_acceptance() {
        // A single variable with a large positive delta and a near-zero
        // temperature: no flip is accepted until the offset covers the delta.
        let q = QuboModel::from_parts(vec![1000], Vec::new(), 0).unwrap();
        let mut replica = Replica::new(&q, 0, 0);
        let mut last = 0.0;
        for it in 0..9 {
            replica.step(&q, 1e-3, 100.0, it);
            assert!(replica.offset > last);
            last = replica.offset;
        }
        replica.step(&q, 1e-3, 100.0, 9);
        replica.step(&q, 1e-3, 100.0, 10);
        assert_eq!(replica.offset, 0.0);
        assert_eq!(replica.accepted, 1);
    }

    #[test]
    fn exchange_preserves_energy_multiset() {
        let inst = figure_one();
        let w = beta_base(&inst, 1).unwrap();
        let q = build_qubo(&inst, &build_conflict_sets(&inst), &w, w.beta + 100);
        let config = AnnealConfig::for_qubo(&q, 37, 4);
        let ladder: Vec<Temperatures> =
            (0..4).map(|k| Temperatures::Fixed(geometric(config.t_max, config.t_min, k, 4))).collect();
        let mut replicas: Vec<Replica> = (0..4).map(|k| Replica::new(&q, 4, k)).collect();
        for (k, r) in replicas.iter_mut().enumerate() {
            r.run(&q, &config, &ladder[k], 0, 37);
        }
        let mut before: Vec<i64> = replicas.iter().map(|r| r.energy).collect();
        for round in 0..10 {
            exchange_round(&mut replicas, &ladder, 4, round);
        }
        let mut after: Vec<i64> = replicas.iter().map(|r| r.energy).collect();
        for r in &replicas {
            assert_eq!(r.energy, q.energy(&r.bits).unwrap());
        }
        before.sort_unstable();
        after.sort_unstable();
        assert_eq!(before, after);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn result_is_consistent(seed in any::<u64>(), size in 1usize..12) {
            let mut rng = rng::stream(seed, 99, 0);
            let linear: Vec<i64> = (0..size).map(|_| rng.gen_range(-20..20)).collect();
            let quad: Vec<((usize, usize), i64)> = (0..size * 2)
                .map(|_| ((rng.gen_range(0..size), rng.gen_range(0..size)), rng.gen_range(-15..15)))
                .filter(|((i, j), _)| i != j)
                .collect();
            let q = QuboModel::from_parts(linear, quad, 3).unwrap();
            let result = anneal(&q, &AnnealConfig::for_qubo(&q, 300, seed)).unwrap();
            prop_assert_eq!(q.energy(&result.best_bits).unwrap(), result.best_energy);
            for pair in result.trace.windows(2) {
                prop_assert!(pair[1].best_energy < pair[0].best_energy);
                prop_assert!(pair[1].iteration >= pair[0].iteration);
            }
            prop_assert_eq!(result.trace.last().unwrap().best_energy, result.best_energy);
        }
    }
}
