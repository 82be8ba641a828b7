//! Seeded Monte-Carlo episodes for any summary-based mechanism.
//!
//! Each episode draws the state, then for every period a private signal, a
//! truthful report, the prescribed action and the tax. Beliefs are interned:
//! under a fixed policy the belief sequence is a deterministic function of the
//! action history, so every distinct belief is evaluated once per cache.
//!
//! Episode `i` of a batch estimate uses ChaCha stream `i` of the master seed,
//! so results do not depend on how rayon schedules the work.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{WelfareReport, WelfareStderr};
use crate::belief::{BeliefKey, SummaryBelief};
use crate::error::{Error, Result};
use crate::inference::{action_probability, belief_transition, in_learning_set, tax};
use crate::mechanisms::MechanismPolicy;
use crate::params::{ModelParams, Sign};
use crate::prescription::Prescription;
use crate::scalar::Scalar;

const BATCH: u64 = 4096;

/// One period of an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Step<T> {
    /// Public belief at the start of the period.
    pub belief: SummaryBelief<T>,
    pub in_learning_set: bool,
    /// Summary of the reports before this period.
    pub summary: i64,
    pub signal: Sign,
    pub action: Sign,
    pub tax: T,
}

/// Outcome of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord<T> {
    pub state: Sign,
    pub steps: Vec<Step<T>>,
    pub gsw: T,
    pub nsw: T,
    pub revenue: T,
    pub horizon: usize,
}

impl<T: Scalar> EpisodeRecord<T> {
    /// Utility `1{a_t = w}` of agent `t` (zero-based).
    pub fn utility(&self, t: usize) -> T {
        if self.steps[t].action == self.state {
            T::one()
        } else {
            T::zero()
        }
    }
}

/// Smallest horizon with `delta^T <= 1e-8`.
pub fn default_horizon(delta: f64) -> usize {
    ((1e-8f64).ln() / delta.ln()).ceil().max(1.0) as usize
}

struct Node<T> {
    belief: SummaryBelief<T>,
    prescription: Prescription<T>,
    tax: T,
    learning: bool,
    children: [Option<usize>; 2],
}

/// Interned belief graph explored lazily under one policy.
struct BeliefCache<'a, T> {
    params: ModelParams<T>,
    policy: &'a MechanismPolicy<T>,
    nodes: Vec<Node<T>>,
    index: HashMap<BeliefKey, usize>,
}

impl<'a, T: Scalar> BeliefCache<'a, T> {
    fn new(params: ModelParams<T>, policy: &'a MechanismPolicy<T>) -> Result<Self> {
        let mut cache = Self {
            params,
            policy,
            nodes: Vec::new(),
            index: HashMap::new(),
        };
        cache.intern(SummaryBelief::point(0))?;
        Ok(cache)
    }

    fn intern(&mut self, belief: SummaryBelief<T>) -> Result<usize> {
        let key = belief.key();
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        let prescription = self.policy.prescribe(&belief);
        let tax = tax(&self.params, &belief, &prescription)?;
        let learning = in_learning_set(&self.params, &belief);
        let id = self.nodes.len();
        self.nodes.push(Node {
            belief,
            prescription,
            tax,
            learning,
            children: [None, None],
        });
        self.index.insert(key, id);
        Ok(id)
    }

    fn child(&mut self, id: usize, action: Sign) -> Result<usize> {
        let slot = usize::from(action == Sign::Plus);
        if let Some(c) = self.nodes[id].children[slot] {
            return Ok(c);
        }
        let node = &self.nodes[id];
        let next = belief_transition(&self.params, &node.belief, action, &node.prescription)?;
        let c = self.intern(next)?;
        self.nodes[id].children[slot] = Some(c);
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Totals {
    gsw: f64,
    revenue: f64,
}

/// Plays one episode. `signal` supplies `y_t` for each period.
fn play<T: Scalar, R: Rng>(
    cache: &mut BeliefCache<'_, T>,
    state: Sign,
    horizon: usize,
    rng: &mut R,
    mut signal: impl FnMut(&mut R, usize) -> Sign,
    mut record: Option<&mut Vec<Step<T>>>,
) -> Result<(T, T)> {
    let delta = cache.params.delta();
    let mut discount = T::one();
    let (mut gsw, mut revenue) = (T::zero(), T::zero());
    let mut node = 0usize;
    let mut summary = 0i64;
    for t in 0..horizon {
        let y = signal(rng, t);
        let n = &cache.nodes[node];
        let action = match n.prescription.deterministic_action(summary, y) {
            Some(a) => a,
            None => {
                let plus = n
                    .prescription
                    .prob_plus(summary, y)
                    .ok_or(Error::Uncovered { n: summary, m: y })?;
                if rng.gen::<f64>() < plus.as_f64() {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            }
        };
        if action == state {
            gsw = gsw + discount;
        }
        revenue = revenue + discount * n.tax;
        if let Some(steps) = record.as_deref_mut() {
            steps.push(Step {
                belief: n.belief.clone(),
                in_learning_set: n.learning,
                summary,
                signal: y,
                action,
                tax: n.tax,
            });
        }
        summary += y.value();
        discount = discount * delta;
        if t + 1 < horizon {
            node = cache.child(node, action)?;
        }
    }
    Ok((gsw, revenue))
}

fn sample_signal<R: Rng>(rng: &mut R, state: Sign, p: f64) -> Sign {
    if rng.gen::<f64>() < p {
        -state
    } else {
        state
    }
}

fn episode_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn record<T: Scalar>(state: Sign, steps: Vec<Step<T>>, gsw: T, revenue: T, horizon: usize) -> EpisodeRecord<T> {
    EpisodeRecord {
        state,
        steps,
        gsw,
        nsw: gsw - revenue,
        revenue,
        horizon,
    }
}

/// Runs one sampled episode; deterministic given `seed`.
pub fn run_episode<T: Scalar>(
    params: &ModelParams<T>,
    policy: &MechanismPolicy<T>,
    horizon: usize,
    seed: u64,
) -> Result<EpisodeRecord<T>> {
    if horizon == 0 {
        return Err(Error::Config("horizon must be at least 1".into()));
    }
    let mut cache = BeliefCache::new(*params, policy)?;
    let mut rng = episode_rng(seed, 0);
    let state = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
    let p = params.p().as_f64();
    let mut steps = Vec::with_capacity(horizon);
    let (gsw, revenue) = play(
        &mut cache,
        state,
        horizon,
        &mut rng,
        |r, _| sample_signal(r, state, p),
        Some(&mut steps),
    )?;
    Ok(record(state, steps, gsw, revenue, horizon))
}

/// Replays an episode with a fixed state and signal sequence. The horizon is
/// the number of signals; `seed` only drives randomized prescriptions.
pub fn run_episode_with_signals<T: Scalar>(
    params: &ModelParams<T>,
    policy: &MechanismPolicy<T>,
    state: Sign,
    signals: &[Sign],
    seed: u64,
) -> Result<EpisodeRecord<T>> {
    if signals.is_empty() {
        return Err(Error::Config("at least one signal is required".into()));
    }
    let mut cache = BeliefCache::new(*params, policy)?;
    let mut rng = episode_rng(seed, 0);
    let mut steps = Vec::with_capacity(signals.len());
    let (gsw, revenue) = play(
        &mut cache,
        state,
        signals.len(),
        &mut rng,
        |_, t| signals[t],
        Some(&mut steps),
    )?;
    Ok(record(state, steps, gsw, revenue, signals.len()))
}

/// Belief the next agent would hold after the last step of `episode`.
pub fn terminal_belief<T: Scalar>(
    params: &ModelParams<T>,
    policy: &MechanismPolicy<T>,
    episode: &EpisodeRecord<T>,
) -> Result<SummaryBelief<T>> {
    let last = episode
        .steps
        .last()
        .ok_or_else(|| Error::Config("empty episode".into()))?;
    belief_transition(params, &last.belief, last.action, &policy.prescribe(&last.belief))
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    sum: [f64; 3],
    sum_sq: [f64; 3],
}

impl Moments {
    fn push(&mut self, t: Totals) {
        let v = [t.gsw, t.gsw - t.revenue, t.revenue];
        self.n += 1;
        for ((s, sq), x) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(v) {
            *s += x;
            *sq += x * x;
        }
    }

    fn merge(mut self, other: Moments) -> Moments {
        self.n += other.n;
        for i in 0..3 {
            self.sum[i] += other.sum[i];
            self.sum_sq[i] += other.sum_sq[i];
        }
        self
    }
}

/// Pairwise reduction in a fixed order.
fn pairwise(parts: &[Moments]) -> Moments {
    match parts.len() {
        0 => Moments::default(),
        1 => parts[0],
        n => pairwise(&parts[..n / 2]).merge(pairwise(&parts[n / 2..])),
    }
}

/// Monte-Carlo estimate of discounted welfare and revenue with standard
/// errors. Identical for a given seed regardless of the rayon pool size.
pub fn estimate<T: Scalar>(
    params: &ModelParams<T>,
    policy: &MechanismPolicy<T>,
    episodes: u64,
    horizon: usize,
    seed: u64,
) -> Result<WelfareReport<T>> {
    if episodes == 0 {
        return Err(Error::Config("episodes must be at least 1".into()));
    }
    if horizon == 0 {
        return Err(Error::Config("horizon must be at least 1".into()));
    }
    let p = params.p().as_f64();
    let batches = episodes.div_ceil(BATCH);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<Moments> {
            let mut cache = BeliefCache::new(*params, policy)?;
            let mut m = Moments::default();
            for i in b * BATCH..((b + 1) * BATCH).min(episodes) {
                let mut rng = episode_rng(seed, i);
                let state = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
                let (gsw, revenue) = play(
                    &mut cache,
                    state,
                    horizon,
                    &mut rng,
                    |r, _| sample_signal(r, state, p),
                    None,
                )?;
                m.push(Totals {
                    gsw: gsw.as_f64(),
                    revenue: revenue.as_f64(),
                });
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let total = pairwise(&parts);
    let n = total.n as f64;
    let mean = total.sum.map(|s| s / n);
    let se: Vec<f64> = (0..3)
        .map(|i| {
            if total.n < 2 {
                0.0
            } else {
                let var = (total.sum_sq[i] - n * mean[i] * mean[i]).max(0.0) / (n - 1.0);
                (var / n).sqrt()
            }
        })
        .collect();
    let delta = params.delta().as_f64();
    Ok(WelfareReport {
        gsw: T::lit(mean[0]),
        nsw: T::lit(mean[1]),
        revenue: T::lit(mean[2]),
        stderr: Some(WelfareStderr {
            gsw: T::lit(se[0]),
            nsw: T::lit(se[1]),
            revenue: T::lit(se[2]),
        }),
        normalized: false,
        truncation_bound: T::lit(delta.powi(horizon as i32) / (1.0 - delta)),
    })
}

/// Probability of each action at `eta` under `policy`; used by callers that
/// compare empirical transition frequencies.
pub fn action_distribution<T: Scalar>(
    params: &ModelParams<T>,
    policy: &MechanismPolicy<T>,
    eta: &SummaryBelief<T>,
) -> Result<[T; 2]> {
    let theta = policy.prescribe(eta);
    Ok([
        action_probability(params, eta, Sign::Minus, &theta)?,
        action_probability(params, eta, Sign::Plus, &theta)?,
    ])
}
