//! Properties of the exact lattice solvers on randomly generated walks.

use std::collections::BTreeMap;

use bangbang::lattice::{
    brute_force_value, classify_skew, drawdown_law, joint_law_max_end, lemma_suite, markov_rule_value, snell_solve,
    value_d, value_g, verify_bang_bang, LatticeStepDistribution, PredictionProblem, SkewClass,
};
use bangbang::reward::RewardSpec;
use bangbang::weight::{parse_exact, Exact};
use proptest::prelude::*;

/// Random step law: up to 3 distinct steps in [-3, 3] with integer weights.
fn dist_exact() -> impl Strategy<Value = LatticeStepDistribution<Exact>> {
    prop::collection::btree_map(-3i64..=3, 1u32..=6, 1..=3).prop_map(|m| {
        let total: u32 = m.values().sum();
        let atoms = m.into_iter().map(|(k, w)| (k, parse_exact(&format!("{w}/{total}")).unwrap())).collect();
        LatticeStepDistribution::new(1.0, atoms).unwrap()
    })
}

/// Rewards with rational values at integer levels, usable in exact mode.
fn reward_exact() -> impl Strategy<Value = RewardSpec> {
    prop_oneof![
        Just(RewardSpec::Indicator0),
        Just(RewardSpec::linear(-1.0)),
        Just(RewardSpec::PiecewiseLinear { knots: vec![(0.0, 2.0), (1.0, 0.5), (3.0, 0.0)] }),
    ]
}

fn reward() -> impl Strategy<Value = RewardSpec> {
    prop_oneof![reward_exact(), Just(RewardSpec::exponential(1.0)), Just(RewardSpec::NegPower { alpha: 0.5 })]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn snell_matches_history_tree(d in dist_exact(), n in 1usize..=5, f in reward_exact()) {
        let p = PredictionProblem::new(d, n, f).unwrap();
        prop_assert_eq!(brute_force_value(&p).unwrap(), snell_solve(&p).unwrap().value);
    }

    #[test]
    fn optimal_value_dominates_trivial_rules(d in dist_exact(), n in 1usize..=6, f in reward_exact()) {
        let p = PredictionProblem::new(d.clone(), n, f.clone()).unwrap();
        let v = snell_solve(&p).unwrap().value;
        prop_assert!(v >= value_g(&d, &f, n, 0).unwrap());
        prop_assert!(v >= value_d(&d, &f, n, 0).unwrap());
    }

    #[test]
    fn g_is_monotone(d in dist_exact(), f in reward()) {
        let d = d.to_f64();
        for k in 0..5 {
            for z in 0..5 {
                let here = value_g(&d, &f, k, z).unwrap();
                prop_assert!(value_g(&d, &f, k, z + 1).unwrap() <= here + 1e-12);
                prop_assert!(value_g(&d, &f, k + 1, z).unwrap() <= here + 1e-12);
            }
        }
    }

    #[test]
    fn drawdown_chain_matches_joint_law(d in dist_exact(), n in 0usize..=6) {
        let joint = joint_law_max_end(&d, n).unwrap();
        let mut from_joint: BTreeMap<i64, Exact> = BTreeMap::new();
        for ((m, x), p) in joint.entries() {
            let e = from_joint.entry(m - x).or_insert_with(|| parse_exact("0").unwrap());
            *e = e.clone() + p.clone();
        }
        prop_assert_eq!(drawdown_law(&d, n).unwrap(), from_joint);
    }

    #[test]
    fn skew_designated_rules_are_optimal(d in dist_exact(), n in 1usize..=6, f in reward()) {
        let class = classify_skew(&d);
        let p = PredictionProblem::new(d.to_f64(), n, f).unwrap();
        if class == SkewClass::Neither {
            prop_assert!(verify_bang_bang(&p).is_err());
        } else {
            let r = verify_bang_bang(&p).unwrap();
            prop_assert!(r.pass, "{:?}", r);
        }
    }

    #[test]
    fn lemma_inequalities_hold(d in dist_exact(), f in reward()) {
        if classify_skew(&d) == SkewClass::RightSkew {
            let r = lemma_suite(&d.to_f64(), &f, 6, &[0, 1, 2, 3, 5]).unwrap();
            prop_assert_eq!(r.violations, 0);
        }
    }

    #[test]
    fn dual_swaps_skew(d in dist_exact()) {
        let swapped = match classify_skew(&d) {
            SkewClass::RightSkew => SkewClass::LeftSkew,
            SkewClass::LeftSkew => SkewClass::RightSkew,
            other => other,
        };
        prop_assert_eq!(classify_skew(&d.dual()), swapped);
    }
}

#[test]
fn stop_now_and_run_to_end_as_markov_rules() {
    let d = LatticeStepDistribution::new(0.5, vec![(2, 0.3), (-1, 0.7)]).unwrap();
    let f = RewardSpec::exponential(0.7);
    let p = PredictionProblem::new(d.clone(), 5, f.clone()).unwrap();
    let now = markov_rule_value(&p, |_, _| true).unwrap();
    let end = markov_rule_value(&p, |n, _| n == 5).unwrap();
    assert!((now - value_g(&d, &f, 5, 0).unwrap()).abs() < 1e-12);
    assert!((end - value_d(&d, &f, 5, 0).unwrap()).abs() < 1e-12);
}
