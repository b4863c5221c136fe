//! Reference computations written directly from the model definitions.
//! They deliberately avoid the crate's conflict sets, verifier and QUBO matrix.

#![allow(dead_code)]

use std::collections::HashSet;

use rwap_core::instance::{Instance, Kind};

pub fn shares_link(instance: &Instance, a: usize, b: usize) -> bool {
    let la: HashSet<usize> = instance.lightpath(a).links.iter().copied().collect();
    instance.lightpath(b).links.iter().any(|l| la.contains(l))
}

/// Whether variables `a` and `b` may not both be selected, by conflict class.
pub fn in_conflict(instance: &Instance, a: usize, b: usize) -> bool {
    if a == b || !shares_link(instance, a, b) {
        return false;
    }
    let (va, vb) = (instance.var(a), instance.var(b));
    let same_wavelength = instance.lightpath(a).wavelength == instance.lightpath(b).wavelength;
    if va.request == vb.request && va.kind != vb.kind {
        return true;
    }
    same_wavelength
}

pub struct Counts {
    pub balance: i64,
    pub multiple_working: i64,
    pub conflicts: i64,
}

pub fn violation_counts(instance: &Instance, bits: &[bool]) -> Counts {
    let mut counts = Counts { balance: 0, multiple_working: 0, conflicts: 0 };
    let mut working = vec![0i64; instance.request_count()];
    let mut protection = vec![0i64; instance.request_count()];
    for (v, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
        let var = instance.var(v);
        match var.kind {
            Kind::Working => working[var.request] += 1,
            Kind::Protection => protection[var.request] += 1,
        }
    }
    for r in 0..instance.request_count() {
        counts.balance += (working[r] - protection[r]).pow(2);
        counts.multiple_working += working[r] * (working[r] - 1);
    }
    let ones: Vec<usize> = (0..bits.len()).filter(|&v| bits[v]).collect();
    for (i, &a) in ones.iter().enumerate() {
        for &b in &ones[i + 1..] {
            if in_conflict(instance, a, b) {
                counts.conflicts += 1;
            }
        }
    }
    counts
}

/// Sum of squared balance gaps, `k (k - 1)` per request with `k` working
/// lightpaths, and one per selected conflicting pair.
pub fn penalty(instance: &Instance, bits: &[bool]) -> i64 {
    let c = violation_counts(instance, bits);
    c.balance + c.multiple_working + c.conflicts
}

pub fn is_feasible(instance: &Instance, bits: &[bool]) -> bool {
    let c = violation_counts(instance, bits);
    c.balance == 0 && c.multiple_working == 0 && c.conflicts == 0
}

pub fn links_used(instance: &Instance, bits: &[bool]) -> i64 {
    (0..bits.len()).filter(|&v| bits[v]).map(|v| instance.lightpath(v).links.len() as i64).sum()
}

pub fn grants(instance: &Instance, bits: &[bool]) -> i64 {
    (0..bits.len()).filter(|&v| bits[v] && instance.var(v).kind == Kind::Working).count() as i64
}

pub fn objective(instance: &Instance, bits: &[bool], alpha: i64, beta: i64) -> i64 {
    alpha * links_used(instance, bits) - beta * grants(instance, bits)
}

pub fn energy(instance: &Instance, bits: &[bool], alpha: i64, beta: i64, rho: i64) -> i64 {
    objective(instance, bits, alpha, beta) + rho * penalty(instance, bits)
}

pub fn bits_of(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// Feasible vectors as `(bits, grants, links)`.
pub fn feasible_points(instance: &Instance) -> Vec<(Vec<bool>, i64, i64)> {
    let n = instance.var_count();
    assert!(n <= 22, "enumeration limited to small instances");
    (0..1u64 << n)
        .map(|m| bits_of(m, n))
        .filter(|b| is_feasible(instance, b))
        .map(|b| {
            let (g, l) = (grants(instance, &b), links_used(instance, &b));
            (b, g, l)
        })
        .collect()
}

/// True iff every feasible pair with more grants has a strictly lower objective.
pub fn prioritizes(points: &[(Vec<bool>, i64, i64)], alpha: i64, beta: i64) -> bool {
    points.iter().all(|(_, g1, l1)| {
        points.iter().filter(|(_, g2, _)| g2 < g1).all(|(_, g2, l2)| alpha * l1 - beta * g1 < alpha * l2 - beta * g2)
    })
}

/// Largest stable set of an undirected graph by subset enumeration.
pub fn max_stable_set(nodes: usize, edges: &[(usize, usize)]) -> usize {
    (0..1u32 << nodes)
        .filter(|m| edges.iter().all(|&(u, v)| m >> u & 1 == 0 || m >> v & 1 == 0))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}
