//! Seeded synthesis of states, observables, and anchored constraint sets
//! for the randomized verification suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::constraint::{Constraint, ConstraintKind, ConstraintSet, HermitianObservable};
use crate::error::{Error, Result};
use crate::matrix::{self, CMat, CVec};
use crate::state::{DensityOperator, PureState};

/// Ginibre matrix with independent standard complex Gaussian entries.
fn ginibre(d: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the R diagonal
/// phases absorbed into Q.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> CMat {
    let g = ginibre(d, rng);
    let qr = g.qr();
    let r_diag: Vec<Complex64> = (0..d).map(|i| qr.r()[(i, i)]).collect();
    let mut q = qr.q();
    for (j, rd) in r_diag.iter().enumerate() {
        let phase = if rd.norm() > 0.0 {
            rd / rd.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Haar-random unit vector.
pub fn random_pure(d: usize, rng: &mut impl Rng) -> PureState {
    let v = CVec::from_fn(d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    PureState::from_unnormalized(v).expect("Gaussian vector is nonzero")
}

/// Random state of the given rank: a Haar unitary conjugating a flat
/// Dirichlet spectrum padded with zeros.
pub fn random_state(d: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityOperator> {
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    // Dirichlet(1, ..., 1) via normalized exponentials.
    let mut spectrum: Vec<f64> = (0..rank).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = spectrum.iter().sum();
    for s in &mut spectrum {
        *s /= total;
    }
    spectrum.extend(std::iter::repeat(0.0).take(d - rank));
    let u = haar_unitary(d, rng);
    DensityOperator::from_eigensystem(&spectrum, &u)
}

/// GUE-style Hermitian observable with O(1) spectral width.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> CMat {
    let g = ginibre(d, rng);
    matrix::hermitian_part(&g).scale(1.0 / (d as f64).sqrt())
}

pub fn random_observable(d: usize, rng: &mut impl Rng) -> HermitianObservable {
    HermitianObservable::new(random_hermitian(d, rng), None).expect("Hermitian by construction")
}

/// Random complex matrix with O(1) operator norm (for E-norm suites).
pub fn random_operator(d: usize, rng: &mut impl Rng) -> CMat {
    ginibre(d, rng).scale(1.0 / (d as f64).sqrt())
}

/// Constraint set anchored at a state: level bounds sit exactly at the
/// state's expected values, sublevel bounds add a nonnegative slack (zero
/// with probability one half, making the constraint active), so the state
/// is feasible by construction.
pub fn random_constraints(
    d: usize,
    kinds: &[ConstraintKind],
    anchored_at: Option<&DensityOperator>,
    rng: &mut impl Rng,
) -> Result<ConstraintSet> {
    let mut constraints = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let observable = random_observable(d, rng);
        let bound = match anchored_at {
            Some(rho) => {
                let value = crate::constraint::expected_value(rho, &observable)?;
                match kind {
                    ConstraintKind::Level => value,
                    ConstraintKind::Sublevel => {
                        if rng.gen_bool(0.5) {
                            value
                        } else {
                            value + rng.gen_range(0.0..1.0f64)
                        }
                    }
                }
            }
            None => rng.gen_range(-1.0..1.0f64),
        };
        constraints.push(Constraint::new(observable, bound, kind)?);
    }
    ConstraintSet::new(constraints)
}

/// Random mixture of the given kinds with length `ell`.
pub fn random_kinds(ell: usize, rng: &mut impl Rng) -> Vec<ConstraintKind> {
    (0..ell)
        .map(|_| {
            if rng.gen_bool(0.5) {
                ConstraintKind::Level
            } else {
                ConstraintKind::Sublevel
            }
        })
        .collect()
}

/// Random Kraus channel: the first block-column of a Haar unitary on a
/// dilated space, giving `n_kraus` operators of shape d x d.
pub fn random_channel(d: usize, n_kraus: usize, rng: &mut impl Rng) -> crate::optimize::KrausChannel {
    let big = haar_unitary(d * n_kraus, rng);
    let ops: Vec<CMat> = (0..n_kraus)
        .map(|j| DMatrix::from_fn(d, d, |i, k| big[(j * d + i, k)]))
        .collect();
    crate::optimize::KrausChannel::new(ops).expect("isometry columns give a channel")
}
