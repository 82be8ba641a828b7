//! Concrete prescriptions and the two reference mechanisms: the cascade
//! baseline (BHW) and no-switch-if-indifference (NSII).

use std::fmt;
use std::sync::Arc;

use crate::belief::SummaryBelief;
use crate::inference::{in_learning_set, log_posterior_odds};
use crate::params::{ModelParams, Sign};
use crate::prescription::Prescription;
use crate::scalar::Scalar;

/// Recommend the reported signal.
pub fn theta_learning<T: Scalar>() -> Prescription<T> {
    Prescription::Learning
}

/// Recommend `direction` unconditionally.
pub fn theta_cascade<T: Scalar>(direction: Sign) -> Prescription<T> {
    Prescription::Cascade(direction)
}

/// Follow `sign(n + m)`, and `sign(n)` when the two cancel.
pub fn theta_no_switch<T: Scalar>() -> Prescription<T> {
    Prescription::NoSwitch
}

/// Built-in mechanisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MechanismKind {
    Bhw,
    Nsii,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 2] = [MechanismKind::Bhw, MechanismKind::Nsii];

    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::Bhw => "bhw",
            MechanismKind::Nsii => "nsii",
        }
    }

    pub fn policy<T: Scalar>(self, params: ModelParams<T>) -> MechanismPolicy<T> {
        match self {
            MechanismKind::Bhw => bhw_policy(params),
            MechanismKind::Nsii => nsii_policy(params),
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MechanismKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bhw" => Ok(MechanismKind::Bhw),
            "nsii" => Ok(MechanismKind::Nsii),
            other => Err(format!("unknown mechanism `{other}` (expected bhw or nsii)")),
        }
    }
}

type Rule<T> = dyn Fn(&SummaryBelief<T>) -> Prescription<T> + Send + Sync;

/// Stationary summary-based mechanism: a map from the public belief to the
/// prescription used this period.
///
/// Custom rules are accepted as-is; truth-telling feasibility is checked where
/// the prescriptions are used, not here.
#[derive(Clone)]
pub struct MechanismPolicy<T> {
    name: String,
    rule: Arc<Rule<T>>,
}

impl<T: Scalar> MechanismPolicy<T> {
    pub fn new<F>(name: impl Into<String>, rule: F) -> Self
    where
        F: Fn(&SummaryBelief<T>) -> Prescription<T> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            rule: Arc::new(rule),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn prescribe(&self, eta: &SummaryBelief<T>) -> Prescription<T> {
        (self.rule)(eta)
    }
}

impl<T> fmt::Debug for MechanismPolicy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MechanismPolicy")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// Cascade baseline: learn inside the learning set, otherwise herd on the
/// side the public belief favors.
pub fn bhw_policy<T: Scalar>(params: ModelParams<T>) -> MechanismPolicy<T> {
    MechanismPolicy::new("bhw", move |eta: &SummaryBelief<T>| {
        if in_learning_set(&params, eta) {
            Prescription::Learning
        } else if log_posterior_odds(&params, eta) > params.signal_llr() {
            Prescription::Cascade(Sign::Plus)
        } else {
            Prescription::Cascade(Sign::Minus)
        }
    })
}

/// No switch if indifference: learn inside the learning set, otherwise track
/// the summary with the no-switch rule.
pub fn nsii_policy<T: Scalar>(params: ModelParams<T>) -> MechanismPolicy<T> {
    MechanismPolicy::new("nsii", move |eta: &SummaryBelief<T>| {
        if in_learning_set(&params, eta) {
            Prescription::Learning
        } else {
            Prescription::NoSwitch
        }
    })
}
