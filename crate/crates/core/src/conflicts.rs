//! Pairwise conflict sets and the grouped exclusion families that replace them.
//!
//! Four classes of conflicting variable pairs exist:
//!
//! * `C1`: a working and a protection lightpath of the same request share a
//!   link, on any wavelengths.
//! * `C2`: a working lightpath of one request and a protection lightpath of a
//!   different request share a link on the same wavelength. Both orientations
//!   are recorded.
//! * `C3`: two working lightpaths share a link on the same wavelength. Each
//!   unordered pair is stored once, in variable order.
//! * `C4`: the same for two protection lightpaths.
//!
//! [`StrongGroups`] covers exactly the same pairs with far fewer rows: one
//! family per working lightpath (its overlapping protections) and one per
//! `(link, wavelength)` pair (every lightpath using it).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::instance::{Instance, Kind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct C1Tuple {
    pub request: usize,
    pub working: usize,
    pub protection: usize,
}

/// Working lightpath `working` of `request` against protection lightpath
/// `protection` of `other`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct C2Tuple {
    pub request: usize,
    pub other: usize,
    pub working: usize,
    pub protection: usize,
}

/// Two lightpaths of the same kind, `(first, index_first) < (second, index_second)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SameKindTuple {
    pub first: usize,
    pub second: usize,
    pub index_first: usize,
    pub index_second: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConflictClass {
    C1,
    C2,
    C3,
    C4,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConflictSets {
    pub c1: Vec<C1Tuple>,
    pub c2: Vec<C2Tuple>,
    pub c3: Vec<SameKindTuple>,
    pub c4: Vec<SameKindTuple>,
}

impl ConflictSets {
    pub fn len(&self) -> usize {
        self.c1.len() + self.c2.len() + self.c3.len() + self.c4.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every tuple as a variable pair `(a, b)` with `a < b`, tagged with its
    /// class, in class order and then tuple order.
    pub fn var_pairs(&self, instance: &Instance) -> Vec<(usize, usize, ConflictClass)> {
        let idx = |r, kind, i| instance.var_index(r, kind, i).expect("conflict tuple within instance");
        let ordered = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let mut out = Vec::with_capacity(self.len());
        for t in &self.c1 {
            let (a, b) = ordered(idx(t.request, Kind::Working, t.working), idx(t.request, Kind::Protection, t.protection));
            out.push((a, b, ConflictClass::C1));
        }
        for t in &self.c2 {
            let (a, b) = ordered(idx(t.request, Kind::Working, t.working), idx(t.other, Kind::Protection, t.protection));
            out.push((a, b, ConflictClass::C2));
        }
        for (set, kind, class) in [(&self.c3, Kind::Working, ConflictClass::C3), (&self.c4, Kind::Protection, ConflictClass::C4)] {
            for t in set {
                let (a, b) = ordered(idx(t.first, kind, t.index_first), idx(t.second, kind, t.index_second));
                out.push((a, b, class));
            }
        }
        out
    }

    /// Distinct conflicting variable pairs.
    pub fn pair_set(&self, instance: &Instance) -> BTreeSet<(usize, usize)> {
        self.var_pairs(instance).into_iter().map(|(a, b, _)| (a, b)).collect()
    }
}

/// True when two ascending id lists share an element.
pub fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

pub fn build_conflict_sets(instance: &Instance) -> ConflictSets {
    let mut sets = ConflictSets::default();

    for r in 0..instance.request_count() {
        for w in instance.working_vars(r) {
            for p in instance.protection_vars(r) {
                if sorted_intersect(instance.sorted_links(w), instance.sorted_links(p)) {
                    sets.c1.push(C1Tuple {
                        request: r,
                        working: instance.var(w).index,
                        protection: instance.var(p).index,
                    });
                }
            }
        }
    }

    let mut by_wavelength = vec![Vec::new(); instance.wavelength_count()];
    for v in 0..instance.var_count() {
        by_wavelength[instance.lightpath(v).wavelength].push(v);
    }
    for vars in &by_wavelength {
        for (i, &a) in vars.iter().enumerate() {
            for &b in &vars[i + 1..] {
                if !sorted_intersect(instance.sorted_links(a), instance.sorted_links(b)) {
                    continue;
                }
                let (va, vb) = (instance.var(a), instance.var(b));
                match (va.kind, vb.kind) {
                    (Kind::Working, Kind::Working) => sets.c3.push(SameKindTuple {
                        first: va.request,
                        second: vb.request,
                        index_first: va.index,
                        index_second: vb.index,
                    }),
                    (Kind::Protection, Kind::Protection) => sets.c4.push(SameKindTuple {
                        first: va.request,
                        second: vb.request,
                        index_first: va.index,
                        index_second: vb.index,
                    }),
                    _ if va.request == vb.request => {}
                    (Kind::Working, Kind::Protection) => sets.c2.push(C2Tuple {
                        request: va.request,
                        other: vb.request,
                        working: va.index,
                        protection: vb.index,
                    }),
                    (Kind::Protection, Kind::Working) => sets.c2.push(C2Tuple {
                        request: vb.request,
                        other: va.request,
                        working: vb.index,
                        protection: va.index,
                    }),
                }
            }
        }
    }
    sets.c2.sort_unstable();
    sets.c3.sort_unstable();
    sets.c4.sort_unstable();
    sets
}

/// Protections of `request` that share a link with working lightpath `working`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapFamily {
    pub request: usize,
    pub working: usize,
    pub protections: Vec<usize>,
}

/// All lightpaths that use `link` on `wavelength`, as ascending variable indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkGroup {
    pub link: usize,
    pub wavelength: usize,
    pub members: Vec<usize>,
}

impl LinkGroup {
    /// Groups with a single member exclude nothing and are not emitted as rows.
    pub fn is_emitted(&self) -> bool {
        self.members.len() >= 2
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrongGroups {
    /// One entry per working lightpath, including those with no overlap.
    pub overlaps: Vec<OverlapFamily>,
    /// Every non-empty `(link, wavelength)` group, ordered by link then wavelength.
    pub groups: Vec<LinkGroup>,
}

impl StrongGroups {
    pub fn emitted_groups(&self) -> impl Iterator<Item = &LinkGroup> {
        self.groups.iter().filter(|g| g.is_emitted())
    }

    /// Pairs excluded by at least one family or group, as `(a, b)` with `a < b`.
    pub fn pair_set(&self, instance: &Instance) -> BTreeSet<(usize, usize)> {
        let mut pairs = BTreeSet::new();
        for fam in &self.overlaps {
            let w = instance.var_index(fam.request, Kind::Working, fam.working).expect("in range");
            for &p in &fam.protections {
                let p = instance.var_index(fam.request, Kind::Protection, p).expect("in range");
                pairs.insert((w.min(p), w.max(p)));
            }
        }
        for g in &self.groups {
            for (i, &a) in g.members.iter().enumerate() {
                for &b in &g.members[i + 1..] {
                    pairs.insert((a, b));
                }
            }
        }
        pairs
    }

    /// For each variable, the variables it excludes when selected.
    pub fn exclusions(&self, instance: &Instance) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); instance.var_count()];
        for (a, b) in self.pair_set(instance) {
            out[a].push(b);
            out[b].push(a);
        }
        for list in &mut out {
            list.sort_unstable();
        }
        out
    }
}

pub fn build_strong_groups(instance: &Instance) -> StrongGroups {
    let mut overlaps = Vec::new();
    for r in 0..instance.request_count() {
        for w in instance.working_vars(r) {
            let protections = instance
                .protection_vars(r)
                .filter(|&p| sorted_intersect(instance.sorted_links(w), instance.sorted_links(p)))
                .map(|p| instance.var(p).index)
                .collect();
            overlaps.push(OverlapFamily { request: r, working: instance.var(w).index, protections });
        }
    }

    let wavelengths = instance.wavelength_count();
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); instance.network().link_count() * wavelengths];
    for v in 0..instance.var_count() {
        let wavelength = instance.lightpath(v).wavelength;
        for &link in instance.sorted_links(v) {
            let slot = &mut slots[link * wavelengths + wavelength];
            if slot.last() != Some(&v) {
                slot.push(v);
            }
        }
    }
    let groups = slots
        .into_iter()
        .enumerate()
        .filter(|(_, members)| !members.is_empty())
        .map(|(slot, members)| LinkGroup { link: slot / wavelengths, wavelength: slot % wavelengths, members })
        .collect();

    StrongGroups { overlaps, groups }
}

/// Row counts of the pairwise and the grouped formulations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintCounts {
    pub vars: usize,
    pub requests: usize,
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
    pub c4: usize,
    pub base: usize,
    /// Grouped rows counting every non-empty group.
    pub strong: usize,
    /// Grouped rows counting only groups with two or more members.
    pub strong_emitted: usize,
    pub singleton_groups: usize,
}

impl ConstraintCounts {
    pub fn new(instance: &Instance, conflicts: &ConflictSets, groups: &StrongGroups) -> Self {
        let requests = instance.request_count();
        let working: usize = instance.requests().iter().map(|r| r.working.len()).sum();
        let emitted = groups.emitted_groups().count();
        Self {
            vars: instance.var_count(),
            requests,
            c1: conflicts.c1.len(),
            c2: conflicts.c2.len(),
            c3: conflicts.c3.len(),
            c4: conflicts.c4.len(),
            base: 2 * requests + conflicts.len(),
            strong: 2 * requests + working + groups.groups.len(),
            strong_emitted: 2 * requests + working + emitted,
            singleton_groups: groups.groups.len() - emitted,
        }
    }

    pub fn base_ratio(&self) -> f64 {
        ratio(self.base, self.vars)
    }

    pub fn strong_ratio(&self) -> f64 {
        ratio(self.strong, self.vars)
    }

    pub fn strong_emitted_ratio(&self) -> f64 {
        ratio(self.strong_emitted, self.vars)
    }
}

fn ratio(rows: usize, vars: usize) -> f64 {
    if vars == 0 {
        0.0
    } else {
        rows as f64 / vars as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{figure_one, independent_requests};
    use crate::gen::{random_small_instance, SmallInstanceParams};
    use proptest::prelude::*;

    /// Pairwise oracle: compares every pair of lightpaths link by link.
    fn naive_sets(inst: &Instance) -> ConflictSets {
        let share = |a: usize, b: usize| {
            let la = &inst.lightpath(a).links;
            la.iter().any(|l| inst.lightpath(b).links.contains(l))
        };
        let mut sets = ConflictSets::default();
        let n = inst.var_count();
        for a in 0..n {
            for b in 0..n {
                let (va, vb) = (inst.var(a), inst.var(b));
                let same_wl = inst.lightpath(a).wavelength == inst.lightpath(b).wavelength;
                match (va.kind, vb.kind) {
                    (Kind::Working, Kind::Protection) if va.request == vb.request && share(a, b) => {
                        sets.c1.push(C1Tuple { request: va.request, working: va.index, protection: vb.index })
                    }
                    (Kind::Working, Kind::Protection) if va.request != vb.request && same_wl && share(a, b) => {
                        sets.c2.push(C2Tuple { request: va.request, other: vb.request, working: va.index, protection: vb.index })
                    }
                    (Kind::Working, Kind::Working) if a < b && same_wl && share(a, b) => sets.c3.push(SameKindTuple {
                        first: va.request,
                        second: vb.request,
                        index_first: va.index,
                        index_second: vb.index,
                    }),
                    (Kind::Protection, Kind::Protection) if a < b && same_wl && share(a, b) => sets.c4.push(SameKindTuple {
                        first: va.request,
                        second: vb.request,
                        index_first: va.index,
                        index_second: vb.index,
                    }),
                    _ => {}
                }
            }
        }
        sets.c1.sort_unstable();
        sets.c2.sort_unstable();
        sets.c3.sort_unstable();
        sets.c4.sort_unstable();
        sets
    }

    #[test]
    fn figure_one_sets() {
        let inst = figure_one();
        let sets = build_conflict_sets(&inst);
        assert_eq!(sets.c1, vec![C1Tuple { request: 0, working: 1, protection: 0 }]);
        assert!(sets.c2.is_empty());
        assert_eq!(sets.c3, vec![SameKindTuple { first: 0, second: 1, index_first: 2, index_second: 0 }]);
        assert_eq!(sets.c4, vec![SameKindTuple { first: 0, second: 1, index_first: 0, index_second: 1 }]);
    }

    #[test]
    fn disjoint_lightpaths_have_no_conflicts() {
        let inst = independent_requests(4, 2, 3);
        assert!(build_conflict_sets(&inst).is_empty());
        let groups = build_strong_groups(&inst);
        assert_eq!(groups.emitted_groups().count(), 0);
    }

    #[test]
    fn figure_one_red_group_on_s2_b() {
        let inst = figure_one();
        let groups = build_strong_groups(&inst);
        // s2 -> b is the forward link of the sixth edge.
        let link = inst
            .network()
            .links()
            .iter()
            .position(|l| l.tail == 1 && l.head == 3)
            .unwrap();
        let group = groups.groups.iter().find(|g| g.link == link && g.wavelength == 0).unwrap();
        let w3 = inst.var_index(0, Kind::Working, 2).unwrap();
        let w1 = inst.var_index(1, Kind::Working, 0).unwrap();
        assert_eq!(group.members, vec![w3, w1]);
    }

    #[test]
    fn single_lightpath_groups_are_singletons() {
        let inst = crate::weights::tight_example(2, 3).unwrap();
        let groups = build_strong_groups(&inst);
        assert!(groups.groups.iter().all(|g| g.members.len() <= 1));
        let counts = ConstraintCounts::new(&inst, &build_conflict_sets(&inst), &groups);
        assert_eq!(counts.base, 2);
        assert_eq!(counts.strong_emitted, 3);
        assert_eq!(counts.singleton_groups, 5);
    }

    #[test]
    fn sorted_intersect_cases() {
        assert!(sorted_intersect(&[1, 4, 9], &[2, 9]));
        assert!(!sorted_intersect(&[1, 4], &[2, 3, 5]));
        assert!(!sorted_intersect(&[], &[1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_pairwise_oracle(seed in any::<u64>()) {
            let inst = random_small_instance(&SmallInstanceParams::default(), seed);
            prop_assert_eq!(build_conflict_sets(&inst), naive_sets(&inst));
        }

        #[test]
        fn groups_cover_exactly_the_conflict_pairs(seed in any::<u64>()) {
            let inst = random_small_instance(&SmallInstanceParams::default(), seed);
            let sets = build_conflict_sets(&inst);
            let groups = build_strong_groups(&inst);
            prop_assert_eq!(groups.pair_set(&inst), sets.pair_set(&inst));
        }

        #[test]
        fn c3_c4_are_canonical(seed in any::<u64>()) {
            let inst = random_small_instance(&SmallInstanceParams::default(), seed);
            let sets = build_conflict_sets(&inst);
            for t in sets.c3.iter().chain(&sets.c4) {
                prop_assert!(t.first < t.second || (t.first == t.second && t.index_first < t.index_second));
            }
            for t in &sets.c2 {
                prop_assert_ne!(t.request, t.other);
            }
        }
    }
}
