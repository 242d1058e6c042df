//! Finitely supported probability densities with exact rational weights.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};

/// Probability density on the positive integers with finite support and
/// exact rational weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDensity {
    weights: BTreeMap<u64, BigRational>,
}

impl FiniteDensity {
    /// Builds a density from (point, weight) pairs; weights must be
    /// strictly positive and sum to one exactly.
    pub fn new(entries: impl IntoIterator<Item = (u64, BigRational)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (n, w) in entries {
            if w.is_negative() || w.is_zero() {
                return Err(Error::Validation {
                    detail: format!("weight at {} must be positive", n),
                });
            }
            *weights.entry(n).or_insert_with(BigRational::zero) += w;
        }
        let total: BigRational = weights.values().cloned().sum();
        if !total.is_one() {
            return Err(Error::Validation {
                detail: format!("weights sum to {}, not 1", total),
            });
        }
        Ok(Self { weights })
    }

    /// Density from (point, numerator, denominator) triples.
    pub fn from_fractions(entries: &[(u64, i64, i64)]) -> Result<Self> {
        Self::new(entries.iter().map(|&(n, num, den)| {
            (n, BigRational::new(BigInt::from(num), BigInt::from(den)))
        }))
    }

    /// Point mass at n.
    pub fn delta(n: u64) -> Self {
        Self {
            weights: BTreeMap::from([(n, BigRational::one())]),
        }
    }

    /// Uniform density on the given points.
    pub fn uniform(support: &[u64]) -> Result<Self> {
        let k = BigInt::from(support.len() as i64);
        Self::new(
            support
                .iter()
                .map(|&n| (n, BigRational::new(BigInt::one(), k.clone()))),
        )
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.weights.keys().copied()
    }

    pub fn weight(&self, n: u64) -> Option<&BigRational> {
        self.weights.get(&n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.weights.iter().map(|(&n, w)| (n, w))
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }
}

/// Whether q lies in the face of the simplex generated by p. For finite
/// supports the ratio criterion reduces to support inclusion.
pub fn simplex_face_membership(q: &FiniteDensity, p: &FiniteDensity) -> bool {
    q.support().all(|n| p.weight(n).is_some())
}

/// Exact segment witness for face membership: a negative lambda and the
/// density (1 - lambda) p + lambda q, which places p on an open segment
/// with q as an endpoint. Returns None exactly when membership fails.
pub fn simplex_segment_witness(
    q: &FiniteDensity,
    p: &FiniteDensity,
) -> Option<(BigRational, FiniteDensity)> {
    if !simplex_face_membership(q, p) {
        return None;
    }
    if q == p {
        let lambda = -BigRational::one();
        return Some((lambda, p.clone()));
    }
    // mu = max q(n) / p(n) over the support of p; mu > 1 since q != p.
    let mu = q
        .iter()
        .map(|(n, w)| w / p.weight(n).expect("support inclusion"))
        .max()
        .expect("nonempty support");
    debug_assert!(mu > BigRational::one());
    let lambda = -BigRational::one() / (&mu - BigRational::one());
    let one_minus_lambda = BigRational::one() - &lambda;
    let entries: Vec<(u64, BigRational)> = p
        .iter()
        .map(|(n, w)| {
            let qn = q.weight(n).cloned().unwrap_or_else(BigRational::zero);
            (n, &one_minus_lambda * w + &lambda * qn)
        })
        .filter(|(_, w)| !w.is_zero())
        .collect();
    let witness = FiniteDensity::new(entries).expect("witness is a density by construction");
    Some((lambda, witness))
}

/// Whether q lies in the relative algebraic interior of the face generated
/// by p: equal supports.
pub fn simplex_ri_membership(q: &FiniteDensity, p: &FiniteDensity) -> bool {
    simplex_face_membership(q, p) && simplex_face_membership(p, q)
}
