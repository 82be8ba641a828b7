//! Summary-based partial strategies: per-step recommendation rules mapping
//! `(summary, message)` to a distribution over actions.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::params::Sign;
use crate::scalar::Scalar;

/// Recommendation rule used by the coordinator for one period.
#[derive(Debug, Clone, PartialEq)]
pub enum Prescription<T> {
    /// Recommend the reported message.
    Learning,
    /// Recommend a fixed action regardless of input.
    Cascade(Sign),
    /// Follow the sign of `n + m`; keep the sign of `n` when `n + m = 0`.
    NoSwitch,
    /// Explicit table of `P(+1 | n, m)`, defined only where listed.
    Table(PrescriptionTable<T>),
}

/// Explicit `(n, m) -> P(a = +1)` table.
#[derive(Debug, Clone, PartialEq)]
pub struct PrescriptionTable<T> {
    plus: BTreeMap<(i64, Sign), T>,
}

impl<T: Scalar> PrescriptionTable<T> {
    /// Every value must be a probability of recommending `+1`.
    pub fn new(plus: BTreeMap<(i64, Sign), T>) -> Result<Self> {
        if let Some(((n, m), v)) = plus.iter().find(|(_, &v)| !(v >= T::zero() && v <= T::one())) {
            return Err(Error::InvalidPrescription(format!(
                "P(+1 | n={n}, m={m}) = {v} is not a probability"
            )));
        }
        Ok(Self { plus })
    }

    /// Deterministic table from a list of recommended actions.
    pub fn deterministic<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = ((i64, Sign), Sign)>,
    {
        Self {
            plus: entries
                .into_iter()
                .map(|(k, a)| (k, if a == Sign::Plus { T::one() } else { T::zero() }))
                .collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((i64, Sign), T)> + '_ {
        self.plus.iter().map(|(&k, &v)| (k, v))
    }
}

impl<T: Scalar> Prescription<T> {
    /// `P(+1 | n, m)`, or `None` where a table has no entry.
    pub fn prob_plus(&self, n: i64, m: Sign) -> Option<T> {
        let det = |a: Sign| if a == Sign::Plus { T::one() } else { T::zero() };
        match self {
            Prescription::Learning => Some(det(m)),
            Prescription::Cascade(a) => Some(det(*a)),
            Prescription::NoSwitch => Some(det(no_switch_action(n, m))),
            Prescription::Table(t) => t.plus.get(&(n, m)).copied(),
        }
    }

    /// `P(action | n, m)`; errors if the rule does not cover `(n, m)`.
    pub fn prob(&self, action: Sign, n: i64, m: Sign) -> Result<T> {
        let plus = self.prob_plus(n, m).ok_or(Error::Uncovered { n, m })?;
        Ok(match action {
            Sign::Plus => plus,
            Sign::Minus => T::one() - plus,
        })
    }

    /// The recommended action if the entry is a point mass.
    pub fn deterministic_action(&self, n: i64, m: Sign) -> Option<Sign> {
        let plus = self.prob_plus(n, m)?;
        if plus == T::one() {
            Some(Sign::Plus)
        } else if plus == T::zero() {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn is_deterministic(&self) -> bool {
        match self {
            Prescription::Table(t) => t.plus.values().all(|&v| v == T::zero() || v == T::one()),
            _ => true,
        }
    }

    /// True when the recommendation never depends on the message.
    pub fn ignores_message(&self) -> bool {
        match self {
            Prescription::Cascade(_) => true,
            Prescription::Learning | Prescription::NoSwitch => false,
            Prescription::Table(t) => t
                .plus
                .iter()
                .all(|(&(n, m), v)| t.plus.get(&(n, -m)).is_none_or(|w| w == v)),
        }
    }
}

/// Action recommended by the no-switch rule.
#[inline]
pub fn no_switch_action(n: i64, m: Sign) -> Sign {
    let s = n + m.value();
    Sign::of(s).or_else(|| Sign::of(n)).unwrap_or(m)
}

impl<T: Scalar> fmt::Display for Prescription<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prescription::Learning => f.write_str("learning"),
            Prescription::Cascade(Sign::Plus) => f.write_str("cascade+"),
            Prescription::Cascade(Sign::Minus) => f.write_str("cascade-"),
            Prescription::NoSwitch => f.write_str("no-switch"),
            Prescription::Table(t) => {
                f.write_str("table[")?;
                for (i, ((n, m), v)) in t.entries().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "({n},{m})->{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}
