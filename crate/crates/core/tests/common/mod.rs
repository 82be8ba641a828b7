//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nsii_core::{
    action_probability, belief_transition, Belief, BeliefKey, Params, Policy, Prescription, PrescriptionTable, Sign,
    SummaryBelief,
};

/// Joint probability of a signal sequence, `sum_w 1/2 prod Q(y_i | w)`.
pub fn signal_sequence_probability(params: &Params, ys: &[Sign]) -> f64 {
    Sign::ALL
        .iter()
        .map(|&w| 0.5 * ys.iter().map(|&y| params.likelihood(y, w)).product::<f64>())
        .sum()
}

fn all_sequences(t: usize) -> Vec<Vec<Sign>> {
    (0..1u32 << t)
        .map(|bits| {
            (0..t)
                .map(|i| if (bits >> i) & 1 == 1 { Sign::Plus } else { Sign::Minus })
                .collect()
        })
        .collect()
}

/// Summary belief given an action history, by enumerating every signal
/// sequence and conditioning on the actions a deterministic mechanism would
/// have produced. Returns one entry per action history with positive
/// probability: `(actions, belief over n_{t+1})`.
pub fn brute_force_beliefs(params: &Params, policy: &Policy, t: usize) -> Vec<(Vec<Sign>, BTreeMap<i64, f64>)> {
    let seqs = all_sequences(t);
    let mut actions: Vec<Vec<Sign>> = vec![Vec::new(); seqs.len()];
    for i in 0..t {
        // group by action prefix and compute the public belief of each group
        let mut groups: BTreeMap<Vec<Sign>, BTreeMap<i64, f64>> = BTreeMap::new();
        for (s, ys) in seqs.iter().enumerate() {
            let prefix = &ys[..i];
            let n: i64 = prefix.iter().map(|y| y.value()).sum();
            let pr = signal_sequence_probability(params, prefix);
            *groups.entry(actions[s].clone()).or_default().entry(n).or_insert(0.0) += pr;
        }
        let prescriptions: BTreeMap<Vec<Sign>, Prescription<f64>> = groups
            .iter()
            .map(|(k, raw)| {
                let total: f64 = raw.values().sum();
                let eta = SummaryBelief::from_pairs(raw.iter().map(|(&n, &v)| (n, v / total))).unwrap();
                (k.clone(), policy.prescribe(&eta))
            })
            .collect();
        for (s, ys) in seqs.iter().enumerate() {
            let n: i64 = ys[..i].iter().map(|y| y.value()).sum();
            let theta = &prescriptions[&actions[s]];
            let a = theta.deterministic_action(n, ys[i]).expect("deterministic mechanism");
            actions[s].push(a);
        }
    }
    let mut finals: BTreeMap<Vec<Sign>, BTreeMap<i64, f64>> = BTreeMap::new();
    for (s, ys) in seqs.iter().enumerate() {
        let n: i64 = ys.iter().map(|y| y.value()).sum();
        *finals.entry(actions[s].clone()).or_default().entry(n).or_insert(0.0) +=
            signal_sequence_probability(params, ys);
    }
    finals
        .into_iter()
        .map(|(a, raw)| {
            let total: f64 = raw.values().sum();
            (a, raw.into_iter().map(|(n, v)| (n, v / total)).collect())
        })
        .collect()
}

/// Belief after an action history by iterating the transition operator.
pub fn iterated_belief(params: &Params, policy: &Policy, actions: &[Sign]) -> nsii_core::Result<Belief> {
    let mut eta = Belief::point(0);
    for &a in actions {
        let theta = policy.prescribe(&eta);
        eta = belief_transition(params, &eta, a, &theta)?;
    }
    Ok(eta)
}

pub fn max_abs_deviation(eta: &Belief, raw: &BTreeMap<i64, f64>) -> f64 {
    let mut keys: Vec<i64> = eta.support().chain(raw.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|n| (eta.get(n) - raw.get(&n).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Every distinct belief reached with positive probability under `policy`
/// within `steps` periods from `1_0` (including `1_0`).
pub fn reachable_beliefs(params: &Params, policy: &Policy, steps: usize) -> Vec<Belief> {
    let root = Belief::point(0);
    let mut seen: BTreeMap<BeliefKey, Belief> = BTreeMap::new();
    seen.insert(root.key(), root.clone());
    let mut frontier = vec![root];
    for _ in 0..steps {
        let mut next = Vec::new();
        for eta in &frontier {
            let theta = policy.prescribe(eta);
            for a in Sign::ALL {
                if action_probability(params, eta, a, &theta).unwrap() > 0.0 {
                    let child = belief_transition(params, eta, a, &theta).unwrap();
                    if seen.insert(child.key(), child.clone()).is_none() {
                        next.push(child);
                    }
                }
            }
        }
        frontier = next;
    }
    seen.into_values().collect()
}

/// All deterministic tables over the support pairs of `eta`.
pub fn all_deterministic_tables(eta: &Belief) -> Vec<Prescription<f64>> {
    let pairs: Vec<(i64, Sign)> = eta
        .support()
        .flat_map(|n| [(n, Sign::Minus), (n, Sign::Plus)])
        .collect();
    (0..1u32 << pairs.len())
        .map(|bits| {
            Prescription::Table(PrescriptionTable::deterministic(
                pairs
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| (k, if (bits >> i) & 1 == 1 { Sign::Plus } else { Sign::Minus })),
            ))
        })
        .collect()
}
