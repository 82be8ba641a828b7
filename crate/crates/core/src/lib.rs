//! Sequential Bayesian social learning with a self-interested information
//! coordinator.
//!
//! Agents observe a binary state through a binary symmetric channel and act in
//! sequence. A coordinator collects truthful signal reports, recommends
//! actions and charges the largest tax agents still accept. The crate provides
//! the summary-belief calculus, the cascade baseline (BHW) and the
//! no-switch-if-indifference mechanism (NSII), exact welfare and revenue
//! analysis, a seeded Monte-Carlo simulator and a small finite-horizon
//! dynamic program for the coordinator.
//!
//! Every numeric routine is generic over [`Scalar`] (`f64` or `f32`); the
//! aliases at the crate root fix the scalar for the common case.

pub mod analytic;
pub mod belief;
pub mod error;
pub mod inference;
pub mod mdp;
pub mod mechanisms;
pub mod params;
pub mod prescription;
pub mod scalar;
pub mod simulator;

pub use analytic::{
    bhw_gsw_closed_form, build_chain, coordinator_revenue, nsii_gsw_closed_form, social_recursion_value,
    welfare_report, ChainModel, Improvement, RevenueSolution, WelfareReport, WelfareStderr, DEFAULT_TRUNCATION,
};
pub use belief::{BeliefKey, SummaryBelief};
pub use error::{Error, Result};
pub use inference::{
    action_probability, belief_transition, cost_of_lying, in_learning_set, is_truthful, outside_best_response,
    posterior_state, state_posterior_given_summary, tax,
};
pub use mdp::{evaluate_policy_finite, solve_finite_horizon, DpSolution, StageEntry};
pub use mechanisms::{
    bhw_policy, nsii_policy, theta_cascade, theta_learning, theta_no_switch, MechanismKind, MechanismPolicy,
};
pub use params::{ModelParams, Sign};
pub use prescription::{Prescription, PrescriptionTable};
pub use scalar::Scalar;
pub use simulator::{default_horizon, estimate, run_episode, run_episode_with_signals, EpisodeRecord, Step};

pub type Params = ModelParams<f64>;
pub type Belief = SummaryBelief<f64>;
pub type Theta = Prescription<f64>;
pub type Policy = MechanismPolicy<f64>;
pub type Chain = ChainModel<f64>;
pub type Report = WelfareReport<f64>;
pub type Episode = EpisodeRecord<f64>;
pub type Dp = DpSolution<f64>;

pub type Params32 = ModelParams<f32>;
pub type Belief32 = SummaryBelief<f32>;
pub type Theta32 = Prescription<f32>;
pub type Policy32 = MechanismPolicy<f32>;
pub type Chain32 = ChainModel<f32>;
pub type Report32 = WelfareReport<f32>;
