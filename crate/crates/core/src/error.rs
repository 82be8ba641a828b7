use thiserror::Error;

use crate::params::Sign;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid summary belief: {0}")]
    InvalidBelief(String),

    #[error("invalid prescription: {0}")]
    InvalidPrescription(String),

    #[error("prescription has no entry for summary {n}, message {m}")]
    Uncovered { n: i64, m: Sign },

    #[error("unreachable observation: action {action} has zero probability under the current belief")]
    UnreachableObservation { action: Sign },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("value iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
