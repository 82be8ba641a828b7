//! Finite-horizon dynamic program for the coordinator's summary-based
//! decision process, restricted to deterministic prescriptions.
//!
//! Randomized prescriptions are excluded, so the optimum reported here is a
//! lower bound on the coordinator's true finite-horizon value.

use std::collections::{BTreeMap, HashMap};

use crate::belief::{BeliefKey, SummaryBelief};
use crate::error::{Error, Result};
use crate::inference::{
    action_probability, belief_transition, outside_best_response, state_posterior_given_summary, tax,
};
use crate::mechanisms::MechanismPolicy;
use crate::params::{ModelParams, Sign};
use crate::prescription::{Prescription, PrescriptionTable};
use crate::scalar::Scalar;

/// Largest horizon the exhaustive solver accepts.
pub const MAX_DP_HORIZON: usize = 7;
/// Largest horizon accepted by [`evaluate_policy_finite`].
pub const MAX_EVAL_HORIZON: usize = 20;

/// Optimal value and decision at one reachable belief.
#[derive(Debug, Clone)]
pub struct StageEntry<T> {
    pub belief: SummaryBelief<T>,
    pub value: T,
    pub prescription: Prescription<T>,
}

/// Value tables and optimal prescriptions for stages `1..=T`.
#[derive(Debug, Clone)]
pub struct DpSolution<T> {
    horizon: usize,
    stages: Vec<Vec<StageEntry<T>>>,
    root_value: T,
}

impl<T: Scalar> DpSolution<T> {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `V_1(1_0)`.
    pub fn root_value(&self) -> T {
        self.root_value
    }

    /// Reachable beliefs of stage `t` (1-based) ordered by their key.
    pub fn stage(&self, t: usize) -> &[StageEntry<T>] {
        &self.stages[t - 1]
    }

    pub fn lookup(&self, t: usize, belief: &SummaryBelief<T>) -> Option<&StageEntry<T>> {
        let key = belief.key();
        self.stage(t).iter().find(|e| e.belief.key() == key)
    }
}

/// Deterministic tables over the `(n, m)` pairs of a support, in lexicographic
/// order with `-1 < +1`. The first pair is the most significant bit of
/// `mask` and a set bit recommends `+1`.
pub fn support_pairs<T: Scalar>(eta: &SummaryBelief<T>) -> Vec<(i64, Sign)> {
    eta.support()
        .flat_map(|n| [(n, Sign::Minus), (n, Sign::Plus)])
        .collect()
}

pub fn table_from_mask<T: Scalar>(pairs: &[(i64, Sign)], mask: u32) -> Prescription<T> {
    let len = pairs.len();
    Prescription::Table(PrescriptionTable::deterministic(pairs.iter().enumerate().map(
        |(i, &k)| {
            let bit = (mask >> (len - 1 - i)) & 1;
            (k, if bit == 1 { Sign::Plus } else { Sign::Minus })
        },
    )))
}

struct Solver<T> {
    params: ModelParams<T>,
    horizon: usize,
    memo: Vec<HashMap<BeliefKey, StageEntry<T>>>,
}

impl<T: Scalar> Solver<T> {
    fn value(&mut self, t: usize, eta: &SummaryBelief<T>) -> Result<T> {
        let key = eta.key();
        if let Some(e) = self.memo[t - 1].get(&key) {
            return Ok(e.value);
        }
        let params = self.params;
        let pairs = support_pairs(eta);
        let len = pairs.len();
        if len > 30 {
            return Err(Error::Config(format!(
                "support of size {} is too large to enumerate",
                eta.len()
            )));
        }

        // weight[i][w] = eta(n) q(w|n) Q(y|w) for pair i = (n, y)
        let weight: Vec<[T; 2]> = pairs
            .iter()
            .map(|&(n, y)| {
                let m = eta.get(n);
                Sign::ALL.map(|w| m * state_posterior_given_summary(&params, n, w) * params.likelihood(y, w))
            })
            .collect();
        let outside = [
            outside_best_response(&params, eta, Sign::Minus),
            outside_best_response(&params, eta, Sign::Plus),
        ];
        let slot = |s: Sign| usize::from(s == Sign::Plus);
        let baseline: T = pairs
            .iter()
            .zip(&weight)
            .map(|(&(_, y), w)| w[slot(outside[slot(y)])])
            .sum();

        let count = 1u32 << len;
        let mut children: Vec<Option<(T, T)>> = vec![None; count as usize];
        let mut values = vec![T::neg_infinity(); count as usize];
        for mask in 0..count {
            let action_of = |i: usize| {
                if (mask >> (len - 1 - i)) & 1 == 1 {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            };
            // truth-telling, pair (n, y) sits next to (n, -y)
            let mut feasible = true;
            for y in Sign::ALL {
                let mut col = T::zero();
                for i in (0..len).filter(|&i| pairs[i].1 == y) {
                    let j = i ^ 1;
                    col = col + weight[i][slot(action_of(i))] - weight[i][slot(action_of(j))];
                }
                if col < -T::FEASIBILITY_TOL {
                    feasible = false;
                }
            }
            if !feasible {
                continue;
            }
            let gain: T = (0..len).map(|i| weight[i][slot(action_of(i))]).sum();
            let mut v = gain - baseline;
            if t < self.horizon {
                let delta = params.delta();
                for subset in [mask, !mask & (count - 1)] {
                    if subset == 0 {
                        continue;
                    }
                    let (prob, cont) = match children[subset as usize] {
                        Some(c) => c,
                        None => {
                            let theta = table_from_mask::<T>(&pairs, subset);
                            let prob = action_probability(&params, eta, Sign::Plus, &theta)?;
                            let next = belief_transition(&params, eta, Sign::Plus, &theta)?;
                            let cont = self.value(t + 1, &next)?;
                            children[subset as usize] = Some((prob, cont));
                            (prob, cont)
                        }
                    };
                    v = v + delta * prob * cont;
                }
            }
            values[mask as usize] = v;
        }

        let best = values.iter().copied().fold(T::neg_infinity(), T::max);
        let choice = values
            .iter()
            .position(|&v| v >= best - T::FEASIBILITY_TOL)
            .expect("outside-option replica is always feasible") as u32;
        self.memo[t - 1].insert(
            key,
            StageEntry {
                belief: eta.clone(),
                value: best,
                prescription: table_from_mask(&pairs, choice),
            },
        );
        Ok(best)
    }
}

/// Exhaustive backward induction from `1_0` over deterministic truthful
/// prescriptions. Ties are broken by the lexicographically smallest table.
pub fn solve_finite_horizon<T: Scalar>(params: &ModelParams<T>, horizon: usize) -> Result<DpSolution<T>> {
    if !(1..=MAX_DP_HORIZON).contains(&horizon) {
        return Err(Error::Config(format!(
            "dp horizon must lie in 1..={MAX_DP_HORIZON}, got {horizon}"
        )));
    }
    let mut solver = Solver {
        params: *params,
        horizon,
        memo: (0..horizon).map(|_| HashMap::new()).collect(),
    };
    let root_value = solver.value(1, &SummaryBelief::point(0))?;
    let stages = solver
        .memo
        .into_iter()
        .map(|m| {
            let mut v: Vec<(BeliefKey, StageEntry<T>)> = m.into_iter().collect();
            v.sort_by(|a, b| a.0.cmp(&b.0));
            v.into_iter().map(|(_, e)| e).collect()
        })
        .collect();
    Ok(DpSolution {
        horizon,
        stages,
        root_value,
    })
}

/// Exact `E[sum_{t<=T} delta^{t-1} tax_t]` under `policy` from `1_0`, by
/// forward propagation of the belief distribution.
pub fn evaluate_policy_finite<T: Scalar>(
    params: &ModelParams<T>,
    policy: &MechanismPolicy<T>,
    horizon: usize,
) -> Result<T> {
    if !(1..=MAX_EVAL_HORIZON).contains(&horizon) {
        return Err(Error::Config(format!(
            "evaluation horizon must lie in 1..={MAX_EVAL_HORIZON}, got {horizon}"
        )));
    }
    let mut layer: BTreeMap<BeliefKey, (SummaryBelief<T>, T)> = BTreeMap::new();
    let root = SummaryBelief::point(0);
    layer.insert(root.key(), (root, T::one()));
    let mut discount = T::one();
    let mut total = T::zero();
    for t in 1..=horizon {
        let mut next: BTreeMap<BeliefKey, (SummaryBelief<T>, T)> = BTreeMap::new();
        for (eta, prob) in layer.values() {
            let theta = policy.prescribe(eta);
            total = total + discount * *prob * tax(params, eta, &theta)?;
            if t == horizon {
                continue;
            }
            for a in Sign::ALL {
                let pa = action_probability(params, eta, a, &theta)?;
                if pa > T::zero() {
                    let child = belief_transition(params, eta, a, &theta)?;
                    let entry = next.entry(child.key()).or_insert_with(|| (child, T::zero()));
                    entry.1 = entry.1 + *prob * pa;
                }
            }
        }
        layer = next;
        discount = discount * params.delta();
    }
    Ok(total)
}
