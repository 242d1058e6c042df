//! The convex cone of univariate polynomials with positive leading
//! coefficient: the face generated by p consists of the polynomials of
//! degree at most deg(p).

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};

/// Univariate polynomial with exact rational coefficients, stored lowest
/// power first with the trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Polynomial from (numerator, denominator) pairs, lowest power first.
    pub fn from_fractions(entries: &[(i64, i64)]) -> Self {
        Self::new(
            entries
                .iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, power: usize) -> BigRational {
        self.coeffs
            .get(power)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// (1 - lambda) self + lambda other, exactly.
    pub fn affine_combination(&self, other: &Self, lambda: &BigRational) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let one_minus = BigRational::one() - lambda;
        Self::new(
            (0..len)
                .map(|k| &one_minus * self.coeff(k) + lambda * other.coeff(k))
                .collect(),
        )
    }
}

fn require_in_cone(p: &Polynomial, which: &str) -> Result<()> {
    match p.leading() {
        Some(lead) if lead.is_positive() => Ok(()),
        Some(_) => Err(Error::InputNotInCone {
            detail: format!("{} has a non-positive leading coefficient", which),
        }),
        None => Err(Error::InputNotInCone {
            detail: format!("{} is the zero polynomial", which),
        }),
    }
}

/// Whether q lies in the face generated by p inside the cone of polynomials
/// with positive leading coefficient: deg(q) <= deg(p).
pub fn poly_face_membership(q: &Polynomial, p: &Polynomial) -> Result<bool> {
    require_in_cone(p, "p")?;
    require_in_cone(q, "q")?;
    Ok(q.degree() <= p.degree())
}

/// Exact witness: a rational lambda < 0 such that (1 - lambda) p + lambda q
/// keeps a positive leading coefficient. Exists exactly on membership.
pub fn poly_segment_witness(
    q: &Polynomial,
    p: &Polynomial,
) -> Result<Option<(BigRational, Polynomial)>> {
    if !poly_face_membership(q, p)? {
        return Ok(None);
    }
    let deg_p = p.degree().expect("in cone");
    let a_p = p.leading().expect("in cone").clone();
    let lambda = if q.degree() < p.degree() {
        -BigRational::one()
    } else {
        let a_q = q.leading().expect("in cone").clone();
        if a_q <= a_p {
            -BigRational::one()
        } else {
            // Need lambda > -a_p / (a_q - a_p); half of that margin works.
            let bound = -&a_p / (&a_q - &a_p);
            bound / BigRational::from_integer(2.into())
        }
    };
    let combo = p.affine_combination(q, &lambda);
    debug_assert_eq!(combo.degree(), Some(deg_p));
    debug_assert!(combo.leading().expect("nonzero").is_positive());
    Ok(Some((lambda, combo)))
}

/// Whether q lies in the relative algebraic interior of the face generated
/// by p: equal degrees.
pub fn poly_ri_membership(q: &Polynomial, p: &Polynomial) -> Result<bool> {
    require_in_cone(p, "p")?;
    require_in_cone(q, "q")?;
    Ok(q.degree() == p.degree())
}
