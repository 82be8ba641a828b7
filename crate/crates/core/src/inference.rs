//! Belief calculus on the summary statistic: state posteriors, the learning
//! set, the outside option, belief transitions, truth-telling and taxes.
//!
//! All comparisons between likelihood ratios are made on the log scale so that
//! summaries far from zero do not overflow.

use std::collections::BTreeMap;

use crate::belief::SummaryBelief;
use crate::error::{Error, Result};
use crate::params::{ModelParams, Sign};
use crate::prescription::Prescription;
use crate::scalar::{log_sum_exp, softplus, Scalar};

/// `q(w | n)`: posterior of the state given summary `n` under the uniform prior.
pub fn state_posterior_given_summary<T: Scalar>(params: &ModelParams<T>, n: i64, w: Sign) -> T {
    let x = T::from_count(n * w.value()) * params.signal_llr();
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `ln q(w | n)`.
pub fn log_state_posterior<T: Scalar>(params: &ModelParams<T>, n: i64, w: Sign) -> T {
    let x = T::from_count(n * w.value()) * params.signal_llr();
    -softplus(-x)
}

/// `P(y | n) = sum_w q(w | n) Q(y | w)`.
pub fn signal_probability<T: Scalar>(params: &ModelParams<T>, n: i64, y: Sign) -> T {
    Sign::ALL
        .iter()
        .map(|&w| state_posterior_given_summary(params, n, w) * params.likelihood(y, w))
        .sum()
}

/// Public posterior `P(W = +1)` under belief `eta`.
pub fn posterior_state<T: Scalar>(params: &ModelParams<T>, eta: &SummaryBelief<T>) -> T {
    eta.iter()
        .map(|(n, m)| m * state_posterior_given_summary(params, n, Sign::Plus))
        .sum()
}

/// `ln P(W = w)` under `eta`, computed by log-sum-exp.
pub fn log_posterior_state<T: Scalar>(params: &ModelParams<T>, eta: &SummaryBelief<T>, w: Sign) -> T {
    let terms: Vec<T> = eta
        .iter()
        .map(|(n, m)| m.ln() + log_state_posterior(params, n, w))
        .collect();
    log_sum_exp(&terms)
}

/// `ln(P(W=+1) / P(W=-1))`; `+inf` when the `-1` state has no mass.
pub fn log_posterior_odds<T: Scalar>(params: &ModelParams<T>, eta: &SummaryBelief<T>) -> T {
    let plus = log_posterior_state(params, eta, Sign::Plus);
    let minus = log_posterior_state(params, eta, Sign::Minus);
    if minus == T::neg_infinity() {
        T::infinity()
    } else if plus == T::neg_infinity() {
        T::neg_infinity()
    } else {
        plus - minus
    }
}

/// Membership in the learning set: the public odds lie within one signal's
/// likelihood ratio of even, boundaries included.
pub fn in_learning_set<T: Scalar>(params: &ModelParams<T>, eta: &SummaryBelief<T>) -> bool {
    let odds = log_posterior_odds(params, eta);
    odds.is_finite() && odds.abs() <= params.signal_llr() + T::FEASIBILITY_TOL
}

/// Action an agent takes on her own given the public belief and her signal.
/// Ties go to `+1`.
pub fn outside_best_response<T: Scalar>(params: &ModelParams<T>, eta: &SummaryBelief<T>, y: Sign) -> Sign {
    let odds = log_posterior_odds(params, eta) + T::from_count(y.value()) * params.signal_llr();
    if odds >= -T::FEASIBILITY_TOL {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Unnormalized weights of `(n, y)` pairs consistent with `action`.
fn action_weights<T: Scalar>(
    params: &ModelParams<T>,
    eta: &SummaryBelief<T>,
    action: Sign,
    theta: &Prescription<T>,
) -> Result<Vec<(i64, Sign, T)>> {
    let mut out = Vec::with_capacity(2 * eta.len());
    for (n, mass) in eta.iter() {
        for y in Sign::ALL {
            let w = mass * signal_probability(params, n, y) * theta.prob(action, n, y)?;
            out.push((n, y, w));
        }
    }
    Ok(out)
}

/// Probability that the prescribed action equals `action` given `eta`, with
/// agents reporting truthfully.
pub fn action_probability<T: Scalar>(
    params: &ModelParams<T>,
    eta: &SummaryBelief<T>,
    action: Sign,
    theta: &Prescription<T>,
) -> Result<T> {
    Ok(action_weights(params, eta, action, theta)?
        .into_iter()
        .map(|(_, _, w)| w)
        .sum())
}

/// Public belief after observing `action` taken under `theta`.
pub fn belief_transition<T: Scalar>(
    params: &ModelParams<T>,
    eta: &SummaryBelief<T>,
    action: Sign,
    theta: &Prescription<T>,
) -> Result<SummaryBelief<T>> {
    let mut next: BTreeMap<i64, T> = BTreeMap::new();
    for (n, y, w) in action_weights(params, eta, action, theta)? {
        if w > T::zero() {
            let e = next.entry(n + y.value()).or_insert_with(T::zero);
            *e = *e + w;
        }
    }
    SummaryBelief::from_weights(next).ok_or(Error::UnreachableObservation { action })
}

/// Expected gain, for an agent with signal `y`, of reporting `y` instead of
/// `-y`. Truth-telling requires this to be nonnegative for both signals.
pub fn cost_of_lying<T: Scalar>(
    params: &ModelParams<T>,
    eta: &SummaryBelief<T>,
    theta: &Prescription<T>,
    y: Sign,
) -> Result<T> {
    let mut total = T::zero();
    for (n, mass) in eta.iter() {
        for w in Sign::ALL {
            let weight = params.likelihood(y, w) * mass * state_posterior_given_summary(params, n, w);
            total = total + weight * (theta.prob(w, n, y)? - theta.prob(w, n, -y)?);
        }
    }
    Ok(total)
}

/// Truth-telling feasibility of `theta` at `eta`.
pub fn is_truthful<T: Scalar>(
    params: &ModelParams<T>,
    eta: &SummaryBelief<T>,
    theta: &Prescription<T>,
) -> Result<bool> {
    for y in Sign::ALL {
        if cost_of_lying(params, eta, theta, y)? < -T::FEASIBILITY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Profit-maximizing tax: expected utility under `theta` minus the expected
/// utility of the outside option.
pub fn tax<T: Scalar>(params: &ModelParams<T>, eta: &SummaryBelief<T>, theta: &Prescription<T>) -> Result<T> {
    let outside = [
        outside_best_response(params, eta, Sign::Minus),
        outside_best_response(params, eta, Sign::Plus),
    ];
    let mut total = T::zero();
    for (n, mass) in eta.iter() {
        for (yi, y) in Sign::ALL.into_iter().enumerate() {
            for w in Sign::ALL {
                let weight = params.likelihood(y, w) * mass * state_posterior_given_summary(params, n, w);
                let own = if outside[yi] == w { T::one() } else { T::zero() };
                total = total + weight * (theta.prob(w, n, y)? - own);
            }
        }
    }
    Ok(total)
}
