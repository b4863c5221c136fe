use serde::{Serialize, Serializer};

use crate::conflicts::ConflictSets;
use crate::error::Result;
use crate::instance::{f_alpha, f_beta, granted_requests, verify_feasible, Instance, Solution};
use crate::weights::Weights;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Parallel-trial annealing of the QUBO.
    Da,
    /// Random-permutation greedy.
    Rs,
    /// Exhaustive enumeration.
    Exact,
    /// Branch-and-bound.
    #[serde(rename = "bnb")]
    BranchAndBound,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Da => "da",
            Method::Rs => "rs",
            Method::Exact => "exact",
            Method::BranchAndBound => "bnb",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Proven optimal.
    Optimal,
    /// Best found by a heuristic; no optimality claim.
    Heuristic,
    /// Exact search stopped at its node budget.
    NodeLimit,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Heuristic => "heuristic",
            SolveStatus::NodeLimit => "node_limit",
        }
    }
}

/// Outcome of any solver, evaluated against the original instance.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub method: Method,
    pub status: SolveStatus,
    #[serde(rename = "bits", serialize_with = "bit_string")]
    pub solution: Solution,
    pub granted: Vec<usize>,
    pub objective: i64,
    pub f_alpha: i64,
    pub f_beta: i64,
    pub feasible: bool,
    /// The raw solver output was infeasible and had bits cleared.
    pub repaired: bool,
    /// Proven lower bound on the objective, for exact methods.
    pub lower_bound: Option<i64>,
    /// QUBO energy of the raw annealer output.
    pub energy: Option<i64>,
    /// Iterations, permutations, enumerated vectors or search nodes.
    pub work: u64,
    /// Some granted request uses different wavelengths on its two lightpaths.
    pub mixed_wavelengths: bool,
}

fn bit_string<S: Serializer>(solution: &Solution, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_str(&solution.to_bit_string())
}

impl SolveReport {
    pub fn evaluate(
        method: Method,
        instance: &Instance,
        conflicts: &ConflictSets,
        solution: Solution,
        weights: &Weights,
    ) -> Result<Self> {
        let fa = f_alpha(instance, &solution)?;
        let fb = f_beta(instance, &solution)?;
        let feasible = verify_feasible(instance, conflicts, &solution)?.is_feasible();
        let granted = granted_requests(instance, &solution)?;
        let mixed_wavelengths = granted.iter().any(|&r| {
            let wl = |range: std::ops::Range<usize>| {
                range.filter(|&v| solution.get(v)).map(|v| instance.lightpath(v).wavelength).next()
            };
            wl(instance.working_vars(r)) != wl(instance.protection_vars(r))
        });
        Ok(Self {
            method,
            status: SolveStatus::Heuristic,
            granted,
            objective: weights.alpha * fa - weights.beta * fb,
            f_alpha: fa,
            f_beta: fb,
            feasible,
            repaired: false,
            lower_bound: None,
            energy: None,
            work: 0,
            mixed_wavelengths,
            solution,
        })
    }

    pub fn granted_count(&self) -> usize {
        self.granted.len()
    }

    /// Average links per granted request, or zero when nothing is granted.
    pub fn links_per_granted(&self) -> f64 {
        if self.granted.is_empty() {
            0.0
        } else {
            self.f_alpha as f64 / self.granted.len() as f64
        }
    }
}
