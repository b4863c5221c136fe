//! Explicit integer programs and their LP-format export.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::conflicts::{ConflictSets, StrongGroups};
use crate::error::Result;
use crate::instance::{Instance, Kind};
use crate::weights::Weights;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// One row per conflicting pair.
    Base,
    /// One row per overlap family and per shared `(link, wavelength)`.
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Equal,
    AtMost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl Row {
    pub fn is_satisfied(&self, bits: &[bool]) -> bool {
        let lhs: i64 = self.coeffs.iter().filter(|(v, _)| bits[*v]).map(|(_, c)| c).sum();
        match self.relation {
            Relation::Equal => lhs == self.rhs,
            Relation::AtMost => lhs <= self.rhs,
        }
    }
}

/// A minimisation problem over binary variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearModel {
    pub kind: ModelKind,
    pub var_names: Vec<String>,
    pub objective: Vec<i64>,
    pub constraints: Vec<Row>,
}

impl LinearModel {
    pub fn is_feasible(&self, bits: &[bool]) -> bool {
        self.constraints.iter().all(|row| row.is_satisfied(bits))
    }

    /// CPLEX LP text. Rows without coefficients are trivially satisfied and
    /// written as comments, since the format cannot express an empty row.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        writeln!(out, "\\ {} model, {} variables, {} rows", self.kind_name(), self.var_names.len(), self.constraints.len()).unwrap();
        out.push_str("Minimize\n obj:");
        let terms: Vec<(usize, i64)> = self.objective.iter().copied().enumerate().filter(|(_, c)| *c != 0).collect();
        if terms.is_empty() {
            out.push_str(" 0");
        } else {
            out.push_str(&self.format_terms(&terms));
        }
        out.push_str("\nSubject To\n");
        for row in &self.constraints {
            let op = match row.relation {
                Relation::Equal => "=",
                Relation::AtMost => "<=",
            };
            if row.coeffs.is_empty() {
                writeln!(out, "\\ {}: empty {} {}", row.name, op, row.rhs).unwrap();
            } else {
                writeln!(out, " {}:{} {} {}", row.name, self.format_terms(&row.coeffs), op, row.rhs).unwrap();
            }
        }
        out.push_str("Binary\n");
        for name in &self.var_names {
            writeln!(out, " {name}").unwrap();
        }
        out.push_str("End\n");
        out
    }

    pub fn write_lp(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::io::write_atomic(path, self.to_lp().as_bytes())
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            ModelKind::Base => "base",
            ModelKind::Strong => "strong",
        }
    }

    fn format_terms(&self, terms: &[(usize, i64)]) -> String {
        let mut out = String::new();
        for (i, &(var, coeff)) in terms.iter().enumerate() {
            let sign = match (i, coeff < 0) {
                (0, false) => " ",
                (0, true) => " -",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            let name = &self.var_names[var];
            match coeff.unsigned_abs() {
                1 => write!(out, "{sign}{name}").unwrap(),
                m => write!(out, "{sign}{m} {name}").unwrap(),
            }
        }
        out
    }
}

/// Where the exclusion rows come from.
#[derive(Clone, Copy, Debug)]
pub enum ConflictSource<'a> {
    Pairs(&'a ConflictSets),
    Groups(&'a StrongGroups),
}

/// Builds the balance and single-working rows for every request, then either
/// one row per conflict tuple or one row per overlap family and per emitted
/// group. Objective coefficients are folded per variable.
pub fn build_ip(instance: &Instance, source: ConflictSource<'_>, weights: &Weights) -> LinearModel {
    let n = instance.var_count();
    let objective = (0..n)
        .map(|v| weights.alpha * instance.length(v) - if instance.var(v).kind == Kind::Working { weights.beta } else { 0 })
        .collect();
    let idx = |r, kind, i| instance.var_index(r, kind, i).expect("tuple within instance");

    let mut constraints = Vec::new();
    for r in 0..instance.request_count() {
        let mut balance: Vec<(usize, i64)> = instance.working_vars(r).map(|v| (v, 1)).collect();
        balance.extend(instance.protection_vars(r).map(|v| (v, -1)));
        constraints.push(Row { name: format!("balance_r{r}"), coeffs: balance, relation: Relation::Equal, rhs: 0 });
        constraints.push(Row {
            name: format!("single_r{r}"),
            coeffs: instance.working_vars(r).map(|v| (v, 1)).collect(),
            relation: Relation::AtMost,
            rhs: 1,
        });
    }
    let pair_row = |name: String, a: usize, b: usize| Row {
        name,
        coeffs: vec![(a.min(b), 1), (a.max(b), 1)],
        relation: Relation::AtMost,
        rhs: 1,
    };

    let kind = match source {
        ConflictSource::Pairs(sets) => {
            for t in &sets.c1 {
                let name = format!("c1_r{}_w{}_p{}", t.request, t.working, t.protection);
                constraints.push(pair_row(name, idx(t.request, Kind::Working, t.working), idx(t.request, Kind::Protection, t.protection)));
            }
            for t in &sets.c2 {
                let name = format!("c2_r{}_r{}_w{}_p{}", t.request, t.other, t.working, t.protection);
                constraints.push(pair_row(name, idx(t.request, Kind::Working, t.working), idx(t.other, Kind::Protection, t.protection)));
            }
            for t in &sets.c3 {
                let name = format!("c3_r{}_r{}_w{}_w{}", t.first, t.second, t.index_first, t.index_second);
                constraints.push(pair_row(name, idx(t.first, Kind::Working, t.index_first), idx(t.second, Kind::Working, t.index_second)));
            }
            for t in &sets.c4 {
                let name = format!("c4_r{}_r{}_p{}_p{}", t.first, t.second, t.index_first, t.index_second);
                constraints.push(pair_row(
                    name,
                    idx(t.first, Kind::Protection, t.index_first),
                    idx(t.second, Kind::Protection, t.index_second),
                ));
            }
            ModelKind::Base
        }
        ConflictSource::Groups(groups) => {
            for fam in &groups.overlaps {
                let mut coeffs = vec![(idx(fam.request, Kind::Working, fam.working), 1)];
                coeffs.extend(fam.protections.iter().map(|&p| (idx(fam.request, Kind::Protection, p), 1)));
                coeffs.sort_unstable();
                constraints.push(Row {
                    name: format!("overlap_r{}_w{}", fam.request, fam.working),
                    coeffs,
                    relation: Relation::AtMost,
                    rhs: 1,
                });
            }
            for g in groups.emitted_groups() {
                constraints.push(Row {
                    name: format!("link_e{}_l{}", g.link, g.wavelength),
                    coeffs: g.members.iter().map(|&v| (v, 1)).collect(),
                    relation: Relation::AtMost,
                    rhs: 1,
                });
            }
            ModelKind::Strong
        }
    };

    LinearModel { kind, var_names: (0..n).map(|v| instance.var_name(v)).collect(), objective, constraints }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflicts::{build_conflict_sets, build_strong_groups};
    use crate::fixtures::figure_one;
    use crate::gen::{random_small_instance, SmallInstanceParams};
    use crate::instance::{verify_feasible, Solution};
    use crate::weights::tight_example;
    use proptest::prelude::*;

    #[test]
    fn tight_example_base_rows() {
        let inst = tight_example(2, 3).unwrap();
        let sets = build_conflict_sets(&inst);
        let model = build_ip(&inst, ConflictSource::Pairs(&sets), &Weights::explicit(1, 6));
        assert_eq!(model.constraints.len(), 2);
        assert_eq!(model.objective, vec![-4, 3]);
        let lp = model.to_lp();
        assert!(lp.contains(" obj: -4 x_r0_w0 + 3 y_r0_p0\n"), "{lp}");
        assert!(lp.contains(" balance_r0: x_r0_w0 - y_r0_p0 = 0\n"));
        assert!(lp.contains(" single_r0: x_r0_w0 <= 1\n"));
    }

    #[test]
    fn figure_one_base_rows() {
        let inst = figure_one();
        let sets = build_conflict_sets(&inst);
        let model = build_ip(&inst, ConflictSource::Pairs(&sets), &Weights::explicit(1, 11));
        let names: Vec<&str> = model.constraints.iter().map(|r| r.name.as_str()).collect();
        for expected in ["c1_r0_w1_p0", "c3_r0_r1_w2_w0", "c4_r0_r1_p0_p1"] {
            assert!(names.contains(&expected), "missing {expected}");
        }
        assert_eq!(model.constraints.len(), 2 * 2 + 3);
    }

    #[test]
    fn strong_row_count() {
        let inst = figure_one();
        let groups = build_strong_groups(&inst);
        let model = build_ip(&inst, ConflictSource::Groups(&groups), &Weights::explicit(1, 11));
        let working: usize = inst.requests().iter().map(|r| r.working.len()).sum();
        assert_eq!(model.constraints.len(), 4 + working + groups.emitted_groups().count());
    }

    #[test]
    fn empty_instance_lp() {
        let inst = Instance::empty();
        let model = build_ip(&inst, ConflictSource::Pairs(&ConflictSets::default()), &Weights::explicit(1, 1));
        assert_eq!(model.to_lp(), "\\ base model, 0 variables, 0 rows\nMinimize\n obj: 0\nSubject To\nBinary\nEnd\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn base_and_strong_agree(seed in any::<u64>()) {
            let inst = random_small_instance(&SmallInstanceParams { max_vars: 12, ..Default::default() }, seed);
            let sets = build_conflict_sets(&inst);
            let groups = build_strong_groups(&inst);
            let w = Weights::explicit(1, 9);
            let base = build_ip(&inst, ConflictSource::Pairs(&sets), &w);
            let strong = build_ip(&inst, ConflictSource::Groups(&groups), &w);
            prop_assert!(base.is_feasible(&vec![false; inst.var_count()]));
            prop_assert!(strong.is_feasible(&vec![false; inst.var_count()]));
            for mask in 0..(1u64 << inst.var_count()) {
                let sol = Solution::from_mask(mask, inst.var_count());
                let expected = verify_feasible(&inst, &sets, &sol).unwrap().is_feasible();
                prop_assert_eq!(base.is_feasible(sol.bits()), expected);
                prop_assert_eq!(strong.is_feasible(sol.bits()), expected);
            }
        }
    }
}
