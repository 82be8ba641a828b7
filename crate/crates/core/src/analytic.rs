//! Exact evaluation of the two mechanisms.
//!
//! Under NSII the public belief started at `1_0` moves on a countable set of
//! beliefs `xi_k`, `k in Z`, forming a Markov reward process whose reward is
//! the per-period tax. The chain is built explicitly up to a truncation
//! `|k| <= K` and solved by value iteration. Gross welfare comes from closed
//! forms, with an independent value-iteration route for the NSII one.

use crate::belief::SummaryBelief;
use crate::error::{Error, Result};
use crate::inference::belief_transition;
use crate::mechanisms::MechanismKind;
use crate::params::{ModelParams, Sign};
use crate::prescription::Prescription;
use crate::scalar::Scalar;

/// Truncation used when none is given.
pub const DEFAULT_TRUNCATION: usize = 200;

/// Iteration cap shared by the value-iteration solvers.
pub const MAX_ITERATIONS: usize = 1_000_000;

/// The NSII belief chain truncated at `|k| <= K`.
#[derive(Debug, Clone)]
pub struct ChainModel<T> {
    params: ModelParams<T>,
    truncation: usize,
    states: Vec<SummaryBelief<T>>,
    transitions: Vec<Vec<(i64, T)>>,
    taxes: Vec<T>,
}

impl<T: Scalar> ChainModel<T> {
    #[inline]
    fn idx(&self, k: i64) -> usize {
        (k + self.truncation as i64) as usize
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Indices `-K..=K`.
    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let k = self.truncation as i64;
        -k..=k
    }

    /// `xi_k`; panics outside `-K..=K`.
    pub fn state(&self, k: i64) -> &SummaryBelief<T> {
        &self.states[self.idx(k)]
    }

    /// Tax `r_k` collected at `xi_k`.
    pub fn tax(&self, k: i64) -> T {
        self.taxes[self.idx(k)]
    }

    /// Outgoing `(target, probability)` pairs of `xi_j`.
    pub fn transitions(&self, j: i64) -> &[(i64, T)] {
        &self.transitions[self.idx(j)]
    }

    /// `q_{j,k}`.
    pub fn transition_probability(&self, j: i64, k: i64) -> T {
        self.transitions(j)
            .iter()
            .filter(|&&(t, _)| t == k)
            .map(|&(_, q)| q)
            .sum()
    }

    /// Index of the chain state within total variation `tol` of `eta`.
    pub fn locate(&self, eta: &SummaryBelief<T>, tol: T) -> Option<i64> {
        self.indices().find(|&k| self.state(k).total_variation(eta) <= tol)
    }
}

/// Builds the chain up to `|k| <= truncation`. The outermost states are made
/// absorbing: their forward mass stays in place.
pub fn build_chain<T: Scalar>(params: ModelParams<T>, truncation: usize) -> Result<ChainModel<T>> {
    if truncation < 4 {
        return Err(Error::Config(format!(
            "chain truncation must be at least 4, got {truncation}"
        )));
    }
    let k_max = truncation as i64;
    let size = 2 * truncation + 1;
    let mut states = vec![SummaryBelief::point(0); size];
    for k in -2..=2i64 {
        states[(k + k_max) as usize] = SummaryBelief::point(k);
    }
    for dir in Sign::ALL {
        let s = dir.value();
        for k in 3..=k_max {
            let prev = &states[(s * (k - 1) + k_max) as usize];
            let next = belief_transition(&params, prev, dir, &Prescription::NoSwitch)?;
            states[(s * k + k_max) as usize] = next;
        }
    }

    let half = T::lit(0.5);
    let gap = params.pbar() - params.p();
    let stay = params.pbar() * params.pbar() + params.p() * params.p();
    let mut transitions = Vec::with_capacity(size);
    let mut taxes = Vec::with_capacity(size);
    for k in -k_max..=k_max {
        let abs = k.abs();
        let s = k.signum();
        let xi = &states[(k + k_max) as usize];
        taxes.push(if k == 0 { T::zero() } else { half * gap * xi.get(0) });

        let forward = if abs == k_max { k } else { k + s };
        let out: Vec<(i64, T)> = match abs {
            0 => vec![(-1, half), (1, half)],
            1 => vec![(0, T::one() - stay), (k + s, stay)],
            2 => vec![(forward, T::one())],
            a if a % 2 == 1 => vec![(forward, T::one())],
            _ => {
                let back = half * xi.get(0);
                vec![(-s, back), (forward, T::one() - back)]
            }
        };
        transitions.push(out);
    }

    Ok(ChainModel {
        params,
        truncation,
        states,
        transitions,
        taxes,
    })
}

/// Coordinator reward-to-go on the chain.
#[derive(Debug, Clone)]
pub struct RevenueSolution<T> {
    /// `R_0`, the expected discounted revenue from `1_0`.
    pub value: T,
    /// `R_k` for `k = -K..=K`.
    pub reward_to_go: Vec<T>,
    /// Upper bound on the error introduced by truncating the chain.
    pub truncation_bound: T,
    pub iterations: usize,
}

/// Solves `R_k = r_k + delta * sum_j q_{k,j} R_j` by value iteration.
///
/// Any path from `xi_0` needs at least `K` steps to reach the truncated
/// boundary, so the truncation error is at most `delta^K * r_max / (1 - delta)`
/// with `r_max = (pbar - p) / 2`.
pub fn coordinator_revenue<T: Scalar>(chain: &ChainModel<T>, delta: T) -> Result<RevenueSolution<T>> {
    if !(delta >= T::zero() && delta < T::one()) {
        return Err(Error::Config(format!("discount must lie in [0, 1), got {delta}")));
    }
    let size = chain.states.len();
    let offset = chain.truncation as i64;
    let mut values = vec![T::zero(); size];
    let mut next = vec![T::zero(); size];
    let mut residual = T::infinity();
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        residual = T::zero();
        for (i, slot) in next.iter_mut().enumerate() {
            let cont: T = chain.transitions[i]
                .iter()
                .map(|&(k, q)| q * values[(k + offset) as usize])
                .sum();
            *slot = chain.taxes[i] + delta * cont;
            residual = residual.max((*slot - values[i]).abs());
        }
        std::mem::swap(&mut values, &mut next);
        if residual <= T::SOLVER_TOL {
            break;
        }
    }
    if residual > T::SOLVER_TOL {
        return Err(Error::NonConvergence {
            iterations,
            residual: residual.as_f64(),
        });
    }
    let params = chain.params();
    let r_max = T::lit(0.5) * (params.pbar() - params.p());
    let truncation_bound = delta.powi(chain.truncation as i32) * r_max / (T::one() - delta);
    Ok(RevenueSolution {
        value: values[chain.idx(0)],
        reward_to_go: values,
        truncation_bound,
        iterations,
    })
}

/// Closed-form expected discounted gross welfare under NSII.
pub fn nsii_gsw_closed_form<T: Scalar>(params: &ModelParams<T>) -> T {
    let (p, pb, d) = (params.p(), params.pbar(), params.delta());
    let one = T::one();
    let root = (one - T::lit(4.0) * d * d * p * pb).sqrt();
    pb / ((one - d) * (one + root)) * (one + (one - T::lit(2.0) * d * d * p) / root)
}

/// Closed-form expected discounted gross welfare of the cascade baseline.
pub fn bhw_gsw_closed_form<T: Scalar>(params: &ModelParams<T>) -> T {
    let (p, pb, d) = (params.p(), params.pbar(), params.delta());
    let one = T::one();
    pb * (one - p * d * d) / ((one - d) * (one - T::lit(2.0) * p * pb * d * d))
}

/// NSII gross welfare by value iteration on the summary random walk
/// conditioned on `W = +1`, with `R_{-K} = 0` and `R_{+K} = 1 / (1 - delta)`.
pub fn social_recursion_value<T: Scalar>(params: &ModelParams<T>, truncation: usize) -> Result<T> {
    if truncation < 10 {
        return Err(Error::Config(format!(
            "walk truncation must be at least 10, got {truncation}"
        )));
    }
    let (p, pb, d) = (params.p(), params.pbar(), params.delta());
    let k_max = truncation as i64;
    let size = 2 * truncation + 1;
    let mut values = vec![T::zero(); size];
    values[size - 1] = T::one() / (T::one() - d);
    let mut next = values.clone();
    let reward = |k: i64| match k.signum() {
        1 => T::one(),
        0 => pb,
        _ => T::zero(),
    };
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut residual = T::zero();
        for i in 1..size - 1 {
            let k = i as i64 - k_max;
            next[i] = reward(k) + d * (pb * values[i + 1] + p * values[i - 1]);
            residual = residual.max((next[i] - values[i]).abs());
        }
        std::mem::swap(&mut values, &mut next);
        if residual <= T::SOLVER_TOL {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NonConvergence {
                iterations,
                residual: residual.as_f64(),
            });
        }
    }
    Ok(values[truncation])
}

/// Standard errors attached to a simulated report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareStderr<T> {
    pub gsw: T,
    pub nsw: T,
    pub revenue: T,
}

/// Discounted welfare summary of one mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareReport<T> {
    pub gsw: T,
    pub nsw: T,
    pub revenue: T,
    /// Present for Monte-Carlo estimates.
    pub stderr: Option<WelfareStderr<T>>,
    /// Whether every quantity has been multiplied by `1 - delta`.
    pub normalized: bool,
    /// Bound on the bias from chain truncation or a finite simulation horizon.
    pub truncation_bound: T,
}

/// Percentage changes relative to the baseline gross welfare.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Improvement<T> {
    pub gross_pct: T,
    pub net_pct: T,
    pub profit_pct: T,
}

impl<T: Scalar> WelfareReport<T> {
    /// Multiplies welfare, revenue, errors and bound by `1 - delta`. Idempotent.
    pub fn normalized(self, delta: T) -> Self {
        if self.normalized {
            return self;
        }
        let f = T::one() - delta;
        Self {
            gsw: self.gsw * f,
            nsw: self.nsw * f,
            revenue: self.revenue * f,
            stderr: self.stderr.map(|s| WelfareStderr {
                gsw: s.gsw * f,
                nsw: s.nsw * f,
                revenue: s.revenue * f,
            }),
            normalized: true,
            truncation_bound: self.truncation_bound * f,
        }
    }

    /// Improvements over a baseline gross welfare on the same scale.
    pub fn improvement_over(&self, baseline_gsw: T) -> Improvement<T> {
        let hundred = T::lit(100.0);
        Improvement {
            gross_pct: hundred * (self.gsw - baseline_gsw) / baseline_gsw,
            net_pct: hundred * (self.nsw - baseline_gsw) / baseline_gsw,
            profit_pct: hundred * self.revenue / baseline_gsw,
        }
    }
}

/// Exact welfare of a built-in mechanism. NSII revenue uses a chain truncated
/// at `truncation`.
pub fn welfare_report<T: Scalar>(
    params: &ModelParams<T>,
    kind: MechanismKind,
    truncation: usize,
) -> Result<WelfareReport<T>> {
    match kind {
        MechanismKind::Bhw => {
            let gsw = bhw_gsw_closed_form(params);
            Ok(WelfareReport {
                gsw,
                nsw: gsw,
                revenue: T::zero(),
                stderr: None,
                normalized: false,
                truncation_bound: T::zero(),
            })
        }
        MechanismKind::Nsii => {
            let gsw = nsii_gsw_closed_form(params);
            let chain = build_chain(*params, truncation)?;
            let rev = coordinator_revenue(&chain, params.delta())?;
            Ok(WelfareReport {
                gsw,
                nsw: gsw - rev.value,
                revenue: rev.value,
                stderr: None,
                normalized: false,
                truncation_bound: rev.truncation_bound,
            })
        }
    }
}
