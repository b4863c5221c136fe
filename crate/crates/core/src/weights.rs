//! Objective weights that make granting a request always worth more than any
//! saving in link usage.
//!
//! The closed-form weight only needs the largest pair length `M`; the minimal
//! weight needs every feasible solution, bucketed by the number of granted
//! requests.

use num_rational::Ratio;
use serde::Serialize;

use crate::conflicts::ConflictSets;
use crate::error::{Error, Result};
use crate::instance::{Instance, Lightpath, Link, Network, Request};
use crate::oracle::MaskModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightSource {
    Explicit,
    BaseFormula,
    TightEnumeration,
}

/// Objective weights `alpha` (per link) and `beta` (per granted request).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Weights {
    pub alpha: i64,
    pub beta: i64,
    pub m_value: Option<i64>,
    pub beta_base: Option<i64>,
    pub source: WeightSource,
}

impl Weights {
    pub fn explicit(alpha: i64, beta: i64) -> Self {
        Self { alpha, beta, m_value: None, beta_base: None, source: WeightSource::Explicit }
    }
}

/// Largest `max working length + max protection length` over grantable requests.
pub fn m_value(instance: &Instance) -> Option<i64> {
    instance
        .requests()
        .iter()
        .filter(|r| r.is_grantable())
        .map(|r| max_length(&r.working) + max_length(&r.protection))
        .max()
}

fn max_length(paths: &[Lightpath]) -> i64 {
    paths.iter().map(Lightpath::length).max().unwrap_or(0)
}

/// Closed-form weights: `beta = alpha * (|R| * (M - 2) + 2) + 1`.
///
/// `|R|` counts every request, grantable or not.
pub fn beta_base(instance: &Instance, alpha: i64) -> Result<Weights> {
    if alpha < 1 {
        return Err(Error::InvalidConfig(format!("alpha must be positive, got {alpha}")));
    }
    let m = m_value(instance).ok_or(Error::UndefinedM)?;
    let beta = alpha * (instance.request_count() as i64 * (m - 2) + 2) + 1;
    Ok(Weights { alpha, beta, m_value: Some(m), beta_base: Some(beta), source: WeightSource::BaseFormula })
}

/// Extremes of link usage among feasible solutions granting `granted` requests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GrantLevel {
    pub granted: i64,
    pub f_alpha_min: i64,
    pub f_alpha_max: i64,
    pub solutions: u64,
}

/// Enumerates all feasible vectors and summarises them per grant count.
pub fn grant_levels(instance: &Instance, conflicts: &ConflictSets, cap: usize) -> Result<Vec<GrantLevel>> {
    let model = MaskModel::new(instance, conflicts, cap)?;
    let mut levels: Vec<Option<GrantLevel>> = vec![None; instance.request_count() + 1];
    model.for_each_feasible(|_, fa, fb| {
        let slot = &mut levels[fb as usize];
        match slot {
            None => *slot = Some(GrantLevel { granted: fb, f_alpha_min: fa, f_alpha_max: fa, solutions: 1 }),
            Some(level) => {
                level.f_alpha_min = level.f_alpha_min.min(fa);
                level.f_alpha_max = level.f_alpha_max.max(fa);
                level.solutions += 1;
            }
        }
    });
    Ok(levels.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaReport {
    /// Largest link-usage jump between adjacent grant levels.
    #[serde(serialize_with = "ratio_text")]
    pub omega_eq: Option<Ratio<i64>>,
    /// Largest per-request link-usage jump between any two grant levels.
    #[serde(serialize_with = "ratio_text")]
    pub omega_gt: Option<Ratio<i64>>,
    /// Smallest integer strictly above `omega_eq`, the minimal `beta` for `alpha = 1`.
    pub beta_tight: Option<i64>,
    pub levels: Vec<GrantLevel>,
}

fn ratio_text<S: serde::Serializer>(value: &Option<Ratio<i64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match value {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Both maxima over the enumerated grant levels, plus the minimal integer weight.
pub fn compute_omega(instance: &Instance, conflicts: &ConflictSets, cap: usize) -> Result<OmegaReport> {
    let levels = grant_levels(instance, conflicts, cap)?;
    let level = |k: i64| levels.iter().find(|l| l.granted == k);

    let omega_eq = levels
        .iter()
        .filter_map(|lo| level(lo.granted + 1).map(|hi| Ratio::from_integer(hi.f_alpha_max - lo.f_alpha_min)))
        .max();

    let mut omega_gt: Option<Ratio<i64>> = None;
    for hi in &levels {
        for lo in levels.iter().filter(|lo| lo.granted < hi.granted) {
            let value = Ratio::new(hi.f_alpha_max - lo.f_alpha_min, hi.granted - lo.granted);
            omega_gt = Some(omega_gt.map_or(value, |m| m.max(value)));
        }
    }

    let beta_tight = omega_eq.map(|omega| omega.floor().to_integer() + 1);
    Ok(OmegaReport { omega_eq, omega_gt, beta_tight, levels })
}

/// True iff every feasible solution granting more requests has a strictly
/// lower objective than every feasible solution granting fewer.
pub fn check_prioritization(
    instance: &Instance,
    conflicts: &ConflictSets,
    alpha: i64,
    beta: i64,
    cap: usize,
) -> Result<bool> {
    let levels = grant_levels(instance, conflicts, cap)?;
    Ok(levels.iter().all(|hi| {
        levels
            .iter()
            .filter(|lo| lo.granted < hi.granted)
            .all(|lo| alpha * hi.f_alpha_max - beta * hi.granted < alpha * lo.f_alpha_min - beta * lo.granted)
    }))
}

/// One request with a single working path of `working_len` links and a
/// single link-disjoint protection path of `protection_len` links, both on
/// wavelength 0.
pub fn tight_example(working_len: usize, protection_len: usize) -> Result<Instance> {
    if working_len == 0 || protection_len == 0 {
        return Err(Error::InvalidInstance("path lengths must be at least 1".into()));
    }
    let (source, destination) = (0, 1);
    let mut node_count = 2;
    let mut links = Vec::new();
    let mut route = |len: usize| {
        let mut ids = Vec::with_capacity(len);
        let mut at = source;
        for step in 0..len {
            let next = if step + 1 == len {
                destination
            } else {
                node_count += 1;
                node_count - 1
            };
            ids.push(links.len());
            links.push(Link { tail: at, head: next });
            at = next;
        }
        Lightpath::new(ids, 0)
    };
    let working = route(working_len);
    let protection = route(protection_len);
    let network = Network::new(node_count, links)?;
    Instance::new(network, 1, vec![Request { source, destination, working: vec![working], protection: vec![protection] }])
}
