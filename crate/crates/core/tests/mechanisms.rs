mod common;

use common::reachable_beliefs;
use nsii_core::{
    bhw_policy, build_chain, cost_of_lying, in_learning_set, nsii_policy, tax, MechanismPolicy, Params, Prescription,
    Sign, SummaryBelief,
};

#[test]
fn nsii_beliefs_stay_on_the_chain() {
    for p in [0.1, 0.25, 0.37] {
        let m = Params::new(p, 0.9).unwrap();
        let chain = build_chain(m, 40).unwrap();
        for eta in reachable_beliefs(&m, &nsii_policy(m), 30) {
            assert!(chain.locate(&eta, 1e-10).is_some(), "p={p}: {eta:?} not in the chain");
        }
    }
}

#[test]
fn bhw_learning_phase_has_three_beliefs() {
    let m = Params::new(0.3, 0.9).unwrap();
    let reach = reachable_beliefs(&m, &bhw_policy(m), 20);
    let mut learning: Vec<i64> = reach
        .iter()
        .filter(|b| in_learning_set(&m, b))
        .map(|b| b.is_point().expect("learning-phase beliefs are point masses"))
        .collect();
    learning.sort_unstable();
    assert_eq!(learning, vec![-1, 0, 1]);
    // cascade beliefs keep the public posterior of the entry point
    for b in reach.iter().filter(|b| !in_learning_set(&m, b)) {
        let odds = nsii_core::inference::log_posterior_odds(&m, b).abs();
        assert!((odds - 2.0 * m.signal_llr()).abs() < 1e-9);
    }
}

#[test]
fn both_policies_are_truthful_on_reachable_beliefs() {
    for p in [0.05, 0.2, 0.45] {
        let m = Params::new(p, 0.9).unwrap();
        for pol in [bhw_policy(m), nsii_policy(m)] {
            for eta in reachable_beliefs(&m, &pol, 25) {
                let theta = pol.prescribe(&eta);
                for y in Sign::ALL {
                    assert!(cost_of_lying(&m, &eta, &theta, y).unwrap() >= -1e-12);
                }
            }
        }
    }
}

#[test]
fn bhw_taxes_vanish() {
    let m = Params::new(0.2, 0.9).unwrap();
    let pol = bhw_policy(m);
    for eta in reachable_beliefs(&m, &pol, 30) {
        assert!(tax(&m, &eta, &pol.prescribe(&eta)).unwrap().abs() <= 1e-12);
    }
}

#[test]
fn learning_prescription_applies_at_the_boundary() {
    let m = Params::new(0.25, 0.9).unwrap();
    for n in [-1, 1] {
        let eta = SummaryBelief::point(n);
        assert!(in_learning_set(&m, &eta));
        assert_eq!(bhw_policy(m).prescribe(&eta), Prescription::Learning);
        assert_eq!(nsii_policy(m).prescribe(&eta), Prescription::Learning);
    }
}

#[test]
fn reversed_custom_mechanism_fails_truth_telling() {
    // feasibility is a property of use, not construction
    let m = Params::new(0.25, 0.9).unwrap();
    let contrarian = MechanismPolicy::new("contrarian", |eta: &SummaryBelief<f64>| {
        Prescription::Table(nsii_core::PrescriptionTable::deterministic(
            eta.support().flat_map(|n| Sign::ALL.map(move |m| ((n, m), -m))),
        ))
    });
    let eta = SummaryBelief::point(0);
    let theta = contrarian.prescribe(&eta);
    assert!(!nsii_core::is_truthful(&m, &eta, &theta).unwrap());
}
