//! Random-permutation greedy.
//!
//! Lightpaths of a request that follow the same link sequence are grouped into
//! one path with a set of available wavelengths. For each permutation of the
//! requests, a request takes the first link-disjoint working/protection path
//! pair (shortest combined length first) that has a wavelength assignment
//! free of every already granted lightpath. The best permutation wins.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::conflicts::{sorted_intersect, ConflictSets};
use crate::error::{Error, Result};
use crate::instance::{Instance, Solution};
use crate::report::{Method, SolveReport};
use crate::rng;
use crate::weights::Weights;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RsConfig {
    pub permutation_budget: u64,
    pub seed: u64,
    /// Also try different wavelengths on the two paths once equal ones fail.
    pub allow_mixed_wavelengths: bool,
    /// Stop early after this much wall time. Makes results timing dependent.
    pub time_limit: Option<Duration>,
    pub threads: Option<usize>,
}

impl RsConfig {
    pub fn new(permutation_budget: u64, seed: u64) -> Self {
        Self { permutation_budget, seed, allow_mixed_wavelengths: true, time_limit: None, threads: None }
    }
}

/// A distinct link sequence with the variable to use on each wavelength.
struct Path {
    links: Vec<usize>,
    sorted: Vec<usize>,
    by_wavelength: Vec<Option<usize>>,
}

struct Plan {
    /// `(working path, protection path)` in trial order.
    pairs: Vec<(usize, usize)>,
    working: Vec<Path>,
    protection: Vec<Path>,
}

fn group_paths(instance: &Instance, vars: std::ops::Range<usize>) -> Vec<Path> {
    let mut paths: Vec<Path> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    for v in vars {
        let lightpath = instance.lightpath(v);
        let slot = *index.entry(lightpath.links.clone()).or_insert_with(|| {
            paths.push(Path {
                links: lightpath.links.clone(),
                sorted: instance.sorted_links(v).to_vec(),
                by_wavelength: vec![None; instance.wavelength_count()],
            });
            paths.len() - 1
        });
        paths[slot].by_wavelength[lightpath.wavelength].get_or_insert(v);
    }
    paths
}

fn plan(instance: &Instance) -> Vec<Plan> {
    (0..instance.request_count())
        .map(|r| {
            let working = group_paths(instance, instance.working_vars(r));
            let protection = group_paths(instance, instance.protection_vars(r));
            let mut pairs: Vec<(usize, usize)> = (0..working.len())
                .flat_map(|w| (0..protection.len()).map(move |p| (w, p)))
                .filter(|&(w, p)| !sorted_intersect(&working[w].sorted, &protection[p].sorted))
                .collect();
            pairs.sort_by_key(|&(w, p)| (working[w].links.len() + protection[p].links.len(), w, p));
            Plan { pairs, working, protection }
        })
        .collect()
}

struct Outcome {
    granted: usize,
    links: usize,
    permutation: u64,
    bits: Vec<bool>,
}

impl Outcome {
    /// More grants first, then fewer links, then the earlier permutation.
    fn beats(&self, other: &Outcome) -> bool {
        (std::cmp::Reverse(self.granted), self.links, self.permutation)
            < (std::cmp::Reverse(other.granted), other.links, other.permutation)
    }
}

struct Workspace {
    occupied: Vec<bool>,
    touched: Vec<usize>,
    order: Vec<usize>,
}

fn run_permutation(instance: &Instance, plans: &[Plan], config: &RsConfig, permutation: u64, ws: &mut Workspace) -> Outcome {
    let wavelengths = instance.wavelength_count();
    ws.order.clear();
    ws.order.extend(0..instance.request_count());
    ws.order.shuffle(&mut rng::stream(config.seed, rng::PERMUTATION, permutation));
    for &slot in &ws.touched {
        ws.occupied[slot] = false;
    }
    ws.touched.clear();

    let mut bits = vec![false; instance.var_count()];
    let (mut granted, mut links) = (0, 0);
    for &r in &ws.order {
        let plan = &plans[r];
        let free = |occupied: &[bool], path: &Path, wl: usize| path.links.iter().all(|&l| !occupied[l * wavelengths + wl]);
        let mut chosen = None;
        'pairs: for &(w, p) in &plan.pairs {
            let (wp, pp) = (&plan.working[w], &plan.protection[p]);
            for wl in 0..wavelengths {
                if let (Some(x), Some(y)) = (wp.by_wavelength[wl], pp.by_wavelength[wl]) {
                    if free(&ws.occupied, wp, wl) && free(&ws.occupied, pp, wl) {
                        chosen = Some((x, y, wp, pp, wl, wl));
                        break 'pairs;
                    }
                }
            }
            if config.allow_mixed_wavelengths {
                for wl_w in 0..wavelengths {
                    let Some(x) = wp.by_wavelength[wl_w] else { continue };
                    if !free(&ws.occupied, wp, wl_w) {
                        continue;
                    }
                    for wl_p in (0..wavelengths).filter(|&l| l != wl_w) {
                        if let Some(y) = pp.by_wavelength[wl_p] {
                            if free(&ws.occupied, pp, wl_p) {
                                chosen = Some((x, y, wp, pp, wl_w, wl_p));
                                break 'pairs;
                            }
                        }
                    }
                }
            }
        }
        if let Some((x, y, wp, pp, wl_w, wl_p)) = chosen {
            for (path, wl) in [(wp, wl_w), (pp, wl_p)] {
                for &l in &path.links {
                    let slot = l * wavelengths + wl;
                    ws.occupied[slot] = true;
                    ws.touched.push(slot);
                }
            }
            bits[x] = true;
            bits[y] = true;
            granted += 1;
            links += wp.links.len() + pp.links.len();
        }
    }
    Outcome { granted, links, permutation, bits }
}

fn workspace(instance: &Instance) -> Workspace {
    Workspace {
        occupied: vec![false; instance.network().link_count() * instance.wavelength_count()],
        touched: Vec::new(),
        order: Vec::with_capacity(instance.request_count()),
    }
}

/// Runs the greedy over `permutation_budget` seeded permutations and keeps
/// the best outcome. `conflicts` is used to verify the returned solution.
pub fn rs_heur(instance: &Instance, conflicts: &ConflictSets, config: &RsConfig) -> Result<SolveReport> {
    if config.permutation_budget == 0 {
        return Err(Error::InvalidConfig("permutation budget must be at least 1".into()));
    }
    let plans = plan(instance);
    let better = |a: Outcome, b: Outcome| if b.beats(&a) { b } else { a };

    let (best, evaluated) = if let Some(limit) = config.time_limit {
        let started = Instant::now();
        let mut ws = workspace(instance);
        let mut best = run_permutation(instance, &plans, config, 0, &mut ws);
        let mut evaluated = 1;
        while evaluated < config.permutation_budget && started.elapsed() < limit {
            best = better(best, run_permutation(instance, &plans, config, evaluated, &mut ws));
            evaluated += 1;
        }
        (best, evaluated)
    } else {
        let search = || {
            (0..config.permutation_budget)
                .into_par_iter()
                .map_init(|| workspace(instance), |ws, k| run_permutation(instance, &plans, config, k, ws))
                .reduce_with(better)
                .expect("budget is positive")
        };
        let best = match config.threads {
            Some(threads) => rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
                .install(search),
            None => search(),
        };
        (best, config.permutation_budget)
    };

    // Objective weights only affect the reported objective value.
    let weights = Weights::explicit(1, crate::weights::beta_base(instance, 1).map_or(1, |w| w.beta));
    let mut report = SolveReport::evaluate(Method::Rs, instance, conflicts, Solution::new(best.bits), &weights)?;
    report.work = evaluated;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflicts::build_conflict_sets;
    use crate::fixtures::{figure_one, independent_requests};
    use crate::gen::{random_small_instance, SmallInstanceParams};
    use crate::instance::verify_feasible;
    use crate::oracle::brute_force_ip;
    use proptest::prelude::*;

    #[test]
    fn figure_one_grants_both() {
        let inst = figure_one();
        let c = build_conflict_sets(&inst);
        for seed in 0..10 {
            let report = rs_heur(&inst, &c, &RsConfig::new(1, seed)).unwrap();
            assert_eq!(report.granted, vec![0, 1], "seed {seed}");
            assert!(report.feasible);
            assert_eq!(report.f_alpha, 8);
        }
    }

    #[test]
    fn ungrantable_grants_nothing() {
        let base = crate::weights::tight_example(2, 3).unwrap();
        let mut requests = base.requests().to_vec();
        requests[0].working.clear();
        let inst = Instance::new(base.network().clone(), 1, requests).unwrap();
        let report = rs_heur(&inst, &build_conflict_sets(&inst), &RsConfig::new(5, 0)).unwrap();
        assert!(report.granted.is_empty());
    }

    #[test]
    fn independent_requests_all_granted() {
        let inst = independent_requests(6, 3, 2);
        let report = rs_heur(&inst, &build_conflict_sets(&inst), &RsConfig::new(3, 1)).unwrap();
        assert_eq!(report.granted.len(), 6);
    }

    #[test]
    fn zero_budget_rejected() {
        let inst = figure_one();
        assert!(rs_heur(&inst, &build_conflict_sets(&inst), &RsConfig::new(0, 0)).is_err());
    }

    #[test]
    fn figure_one_needs_mixed_wavelengths() {
        let inst = figure_one();
        let c = build_conflict_sets(&inst);
        let mixed = rs_heur(&inst, &c, &RsConfig::new(4, 2)).unwrap();
        assert!(mixed.mixed_wavelengths);
        let mut config = RsConfig::new(4, 2);
        config.allow_mixed_wavelengths = false;
        let same = rs_heur(&inst, &c, &config).unwrap();
        assert_eq!(same.granted, vec![1]);
        assert!(!same.mixed_wavelengths);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let inst = random_small_instance(&SmallInstanceParams { max_vars: 14, ..Default::default() }, 77);
        let c = build_conflict_sets(&inst);
        let mut one = RsConfig::new(40, 5);
        one.threads = Some(1);
        let mut four = one.clone();
        four.threads = Some(4);
        let a = rs_heur(&inst, &c, &one).unwrap();
        let b = rs_heur(&inst, &c, &four).unwrap();
        assert_eq!(a.solution, b.solution);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sound_and_bounded(seed in any::<u64>(), rs_seed in any::<u64>()) {
            let inst = random_small_instance(&SmallInstanceParams::default(), seed);
            let c = build_conflict_sets(&inst);
            let report = rs_heur(&inst, &c, &RsConfig::new(8, rs_seed)).unwrap();
            prop_assert!(verify_feasible(&inst, &c, &report.solution).unwrap().is_feasible());
            let exact = brute_force_ip(&inst, &c, &Weights::explicit(0, 1)).unwrap();
            prop_assert!(report.granted.len() <= exact.granted.len());
        }

        #[test]
        fn monotone_in_budget(seed in any::<u64>(), rs_seed in any::<u64>(), budget in 1u64..12) {
            let inst = random_small_instance(&SmallInstanceParams::default(), seed);
            let c = build_conflict_sets(&inst);
            let small = rs_heur(&inst, &c, &RsConfig::new(budget, rs_seed)).unwrap();
            let large = rs_heur(&inst, &c, &RsConfig::new(budget + 5, rs_seed)).unwrap();
            prop_assert!(large.granted.len() >= small.granted.len());
        }
    }
}
