//! Sparse public belief over the running signal summary.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Distribution over integer summaries `n`.
///
/// Every support point shares one parity and the masses sum to one. The map is
/// ordered so that iteration, hashing keys and printed output are stable.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryBelief<T> {
    mass: BTreeMap<i64, T>,
}

/// Hashable fingerprint of a belief: sorted support with masses rounded to
/// 1e-12.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeliefKey(Vec<(i64, i64)>);

impl<T: Scalar> SummaryBelief<T> {
    /// The degenerate belief `1_n`.
    pub fn point(n: i64) -> Self {
        let mut mass = BTreeMap::new();
        mass.insert(n, T::one());
        Self { mass }
    }

    /// Builds a belief from `(summary, mass)` pairs, merging duplicates and
    /// validating the invariants. Zero entries are dropped.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, T)>,
    {
        let mut mass = BTreeMap::new();
        for (n, m) in pairs {
            if !(m >= T::zero() && m <= T::one() + T::MASS_TOL) {
                return Err(Error::InvalidBelief(format!(
                    "mass {m} at summary {n} is not a probability"
                )));
            }
            if m > T::zero() {
                let e = mass.entry(n).or_insert_with(T::zero);
                *e = *e + m;
            }
        }
        let belief = Self { mass };
        belief.validate()?;
        Ok(belief)
    }

    /// Normalizes nonnegative weights into a belief, pruning entries whose
    /// normalized mass is below [`Scalar::PRUNE`].
    pub(crate) fn from_weights(weights: BTreeMap<i64, T>) -> Option<Self> {
        let total: T = weights.values().copied().sum();
        if total.is_nan() || total <= T::zero() {
            return None;
        }
        let mut mass: BTreeMap<i64, T> = weights
            .into_iter()
            .map(|(n, w)| (n, w / total))
            .filter(|&(_, m)| m >= T::PRUNE)
            .collect();
        let kept: T = mass.values().copied().sum();
        for m in mass.values_mut() {
            *m = *m / kept;
        }
        Some(Self { mass })
    }

    fn validate(&self) -> Result<()> {
        if self.mass.is_empty() {
            return Err(Error::InvalidBelief("empty support".into()));
        }
        let total: T = self.mass.values().copied().sum();
        if (total - T::one()).abs() > T::MASS_TOL {
            return Err(Error::InvalidBelief(format!("total mass {total} differs from 1")));
        }
        let parity = self.mass.keys().next().map(|n| n.rem_euclid(2));
        if self.mass.keys().any(|n| Some(n.rem_euclid(2)) != parity) {
            return Err(Error::InvalidBelief("support mixes parities".into()));
        }
        Ok(())
    }

    /// Mass at `n` (zero off the support).
    #[inline]
    pub fn get(&self, n: i64) -> T {
        self.mass.get(&n).copied().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.mass.iter().map(|(&n, &m)| (n, m))
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.mass.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// `0` or `1`; the parity every support point shares.
    pub fn parity(&self) -> i64 {
        self.mass.keys().next().map_or(0, |n| n.rem_euclid(2))
    }

    pub fn is_point(&self) -> Option<i64> {
        if self.mass.len() == 1 {
            self.mass.keys().next().copied()
        } else {
            None
        }
    }

    /// Reflection `n -> -n`.
    pub fn mirrored(&self) -> Self {
        Self {
            mass: self.mass.iter().map(|(&n, &m)| (-n, m)).collect(),
        }
    }

    pub fn total_variation(&self, other: &Self) -> T {
        let mut keys: Vec<i64> = self.support().chain(other.support()).collect();
        keys.sort_unstable();
        keys.dedup();
        let l1: T = keys.into_iter().map(|n| (self.get(n) - other.get(n)).abs()).sum();
        l1 * T::lit(0.5)
    }

    pub fn key(&self) -> BeliefKey {
        BeliefKey(
            self.mass
                .iter()
                .map(|(&n, &m)| (n, (m.as_f64() * 1e12).round() as i64))
                .filter(|&(_, m)| m != 0)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass() {
        let b = SummaryBelief::<f64>::point(3);
        assert_eq!(b.get(3), 1.0);
        assert_eq!(b.get(1), 0.0);
        assert_eq!(b.parity(), 1);
        assert_eq!(b.is_point(), Some(3));
    }

    #[test]
    fn rejects_bad_beliefs() {
        assert!(SummaryBelief::<f64>::from_pairs([(1, 0.5), (2, 0.5)]).is_err());
        assert!(SummaryBelief::<f64>::from_pairs([(1, 0.5), (3, 0.4)]).is_err());
        assert!(SummaryBelief::<f64>::from_pairs([(1, -0.1), (3, 1.1)]).is_err());
        assert!(SummaryBelief::<f64>::from_pairs(Vec::<(i64, f64)>::new()).is_err());
        let b = SummaryBelief::<f64>::from_pairs([(1, 0.3), (3, 0.7), (1, 0.0)]).unwrap();
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn merges_duplicates() {
        let b = SummaryBelief::<f64>::from_pairs([(-1, 0.25), (-1, 0.25), (1, 0.5)]).unwrap();
        assert_eq!(b.get(-1), 0.5);
    }

    #[test]
    fn negative_parity_is_consistent() {
        let b = SummaryBelief::<f64>::from_pairs([(-3, 0.5), (1, 0.5)]).unwrap();
        assert_eq!(b.parity(), 1);
        assert_eq!(b.mirrored().get(3), 0.5);
    }

    #[test]
    fn pruning_renormalizes() {
        let w: BTreeMap<i64, f64> = [(0, 1.0), (2, 1e-17), (4, 3.0)].into_iter().collect();
        let b = SummaryBelief::from_weights(w).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b.get(0) - 0.25).abs() < 1e-15);
        assert!(SummaryBelief::<f64>::from_weights(BTreeMap::new()).is_none());
    }

    #[test]
    fn total_variation_and_keys() {
        let a = SummaryBelief::<f64>::from_pairs([(1, 0.3), (3, 0.7)]).unwrap();
        let b = SummaryBelief::<f64>::from_pairs([(1, 0.5), (3, 0.5)]).unwrap();
        assert!((a.total_variation(&b) - 0.2).abs() < 1e-15);
        assert_eq!(a.key(), a.clone().key());
        assert_ne!(a.key(), b.key());
    }
}
