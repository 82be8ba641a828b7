//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the model can be evaluated in.
///
/// The associated constants are the numeric tolerances used throughout; they
/// scale with the precision of the type so that `f32` evaluation stays usable.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Slack allowed on feasibility (truth-telling) and tie comparisons.
    const FEASIBILITY_TOL: Self;
    /// Slack allowed on total probability mass.
    const MASS_TOL: Self;
    /// Belief entries below this are dropped after a transition.
    const PRUNE: Self;
    /// Sup-norm stopping tolerance for value iteration.
    const SOLVER_TOL: Self;

    /// Converts an `f64` literal. Panics only if the type cannot represent it.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const FEASIBILITY_TOL: Self = 1e-12;
    const MASS_TOL: Self = 1e-9;
    const PRUNE: Self = 1e-15;
    const SOLVER_TOL: Self = 1e-12;
}

impl Scalar for f32 {
    const FEASIBILITY_TOL: Self = 1e-6;
    const MASS_TOL: Self = 1e-4;
    const PRUNE: Self = 1e-12;
    const SOLVER_TOL: Self = 1e-6;
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Log of a sum of exponentials; `-inf` for an empty input.
pub(crate) fn log_sum_exp<T: Scalar>(terms: &[T]) -> T {
    let max = terms
        .iter()
        .copied()
        .fold(T::neg_infinity(), |acc, x| if x > acc { x } else { acc });
    if max == T::neg_infinity() {
        return max;
    }
    let sum: T = terms.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_is_stable() {
        assert!((softplus(0.0f64) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(softplus(1000.0f64), 1000.0);
        assert!(softplus(-1000.0f64) >= 0.0);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        let v = log_sum_exp(&[-1000.0f64, -1000.0]);
        assert!((v - (-1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 0.0]), 0.0);
    }
}
