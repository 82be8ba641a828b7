//! Environment constants and the binary alphabet shared by states, signals,
//! messages and actions.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An element of `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Minus, Sign::Plus];

    #[inline]
    pub fn value(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    /// Sign of a nonzero integer.
    #[inline]
    pub fn of(x: i64) -> Option<Sign> {
        match x.signum() {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.flip()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-1",
            Sign::Plus => "+1",
        })
    }
}

/// Crossover probability of the private-signal channel and the discount factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    p: T,
    delta: T,
}

impl<T: Scalar> ModelParams<T> {
    /// Requires `0 < p < 1/2` and `0 < delta < 1`.
    pub fn new(p: T, delta: T) -> Result<Self> {
        let half = T::lit(0.5);
        if !(p > T::zero() && p < half) {
            return Err(Error::InvalidParams(format!(
                "crossover probability must lie in (0, 0.5), got {p}"
            )));
        }
        if !(delta > T::zero() && delta < T::one()) {
            return Err(Error::InvalidParams(format!(
                "discount factor must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Self { p, delta })
    }

    #[inline]
    pub fn p(&self) -> T {
        self.p
    }

    #[inline]
    pub fn pbar(&self) -> T {
        T::one() - self.p
    }

    #[inline]
    pub fn delta(&self) -> T {
        self.delta
    }

    /// Same channel, different discount.
    pub fn with_delta(&self, delta: T) -> Result<Self> {
        Self::new(self.p, delta)
    }

    /// `ln(pbar / p)`, the log-likelihood ratio carried by one signal.
    #[inline]
    pub fn signal_llr(&self) -> T {
        (self.pbar() / self.p).ln()
    }

    /// Channel likelihood `Q(y | w)`.
    #[inline]
    pub fn likelihood(&self, y: Sign, w: Sign) -> T {
        if y == w {
            self.pbar()
        } else {
            self.p
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(ModelParams::new(0.0, 0.9).is_err());
        assert!(ModelParams::new(0.5, 0.9).is_err());
        assert!(ModelParams::new(0.25, 1.0).is_err());
        assert!(ModelParams::new(0.25, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 0.9).is_err());
        let ok = ModelParams::new(0.25, 0.9).unwrap();
        assert!(ok.pbar() > ok.p());
    }

    #[test]
    fn channel_is_symmetric() {
        let m = ModelParams::new(0.25f64, 0.9).unwrap();
        assert_eq!(m.likelihood(Sign::Plus, Sign::Plus), 0.75);
        assert_eq!(m.likelihood(Sign::Minus, Sign::Plus), 0.25);
        assert_eq!(m.likelihood(Sign::Plus, Sign::Minus), 0.25);
        assert!((m.signal_llr() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn sign_helpers() {
        assert_eq!(Sign::of(3), Some(Sign::Plus));
        assert_eq!(Sign::of(-2), Some(Sign::Minus));
        assert_eq!(Sign::of(0), None);
        assert_eq!(-Sign::Plus, Sign::Minus);
    }
}
