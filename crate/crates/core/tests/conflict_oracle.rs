mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rwap_core::conflicts::{build_conflict_sets, build_strong_groups};
use rwap_core::gen::{random_small_instance, SmallInstanceParams};
use rwap_core::instance::{verify_feasible, Solution};
use rwap_core::qubo::penalty;

fn reference_pairs(inst: &rwap_core::Instance) -> BTreeSet<(usize, usize)> {
    let n = inst.var_count();
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| support::in_conflict(inst, a, b)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_sets_match_reference(seed in any::<u64>()) {
        let inst = random_small_instance(&SmallInstanceParams { max_vars: 16, ..Default::default() }, seed);
        let expected = reference_pairs(&inst);
        prop_assert_eq!(build_conflict_sets(&inst).pair_set(&inst), expected.clone());
        prop_assert_eq!(build_strong_groups(&inst).pair_set(&inst), expected);
    }

    #[test]
    fn verifier_and_penalty_match_reference(seed in any::<u64>(), mask in any::<u64>()) {
        let inst = random_small_instance(&SmallInstanceParams::default(), seed);
        let n = inst.var_count();
        let bits = support::bits_of(mask & ((1u64 << n) - 1), n);
        let sets = build_conflict_sets(&inst);
        let sol = Solution::new(bits.clone());
        prop_assert_eq!(verify_feasible(&inst, &sets, &sol).unwrap().is_feasible(), support::is_feasible(&inst, &bits));
        prop_assert_eq!(penalty(&inst, &sets, &sol).unwrap().total, support::penalty(&inst, &bits));
    }
}
