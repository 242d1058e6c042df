//! States: density operators, subnormalized (trace <= 1) positive operators,
//! pure-state vectors, and numerical support decisions.
//!
//! Eigen-data is computed once at construction and cached; every rank or
//! support decision routes through that single decomposition.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{
    self, identity, max_abs, require_hermitian, trace, CMat, CVec, ComplexMatrix, EigH,
};
use crate::tol;

/// Orthogonal projector onto the numerically significant eigenspace.
#[derive(Debug, Clone)]
pub struct Support {
    /// d x r matrix whose columns span the support.
    pub basis: CMat,
    /// d x d projector, basis * basis^dagger.
    pub projector: CMat,
    /// Numerical rank.
    pub rank: usize,
    /// Some eigenvalue sits within a factor 10 of the cutoff; the rank
    /// decision is reported rather than trusted silently.
    pub near_degenerate: bool,
}

fn support_from_eig(eig: &EigH, rel_tol: f64) -> Result<Support> {
    let lambda_max = eig.lambda_max();
    if lambda_max <= tol::TAU_PSD {
        return Err(Error::ZeroMatrix { lambda_max });
    }
    let cut = rel_tol * lambda_max;
    let rank = eig.values.iter().filter(|&&v| v > cut).count();
    let near_degenerate = eig
        .values
        .iter()
        .any(|&v| v > 0.1 * cut && v < 10.0 * cut);
    let d = eig.dim();
    let basis = CMat::from_fn(d, rank, |i, k| eig.vectors[(i, k)]);
    let projector = &basis * basis.adjoint();
    debug_assert!(max_abs(&(&projector * &projector - &projector)) <= 1e-12);
    Ok(Support {
        basis,
        projector,
        rank,
        near_degenerate,
    })
}

/// Positive semidefinite, unit-trace matrix with cached spectral data.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    mat: CMat,
    eig: EigH,
}

impl DensityOperator {
    pub fn new(mat: CMat) -> Result<Self> {
        require_hermitian(&mat)?;
        let mat = matrix::hermitian_part(&mat);
        let eig = EigH::new(&mat);
        let tr = trace(&mat).re;
        if (tr - 1.0).abs() > tol::TAU_TRACE {
            return Err(Error::Validation {
                detail: format!("trace {} deviates from 1 beyond {:e}", tr, tol::TAU_TRACE),
            });
        }
        let floor = tol::scaled(tol::TAU_PSD, eig.lambda_max());
        if eig.lambda_min() < -floor {
            return Err(Error::Validation {
                detail: format!(
                    "eigenvalue {:.3e} below the PSD floor -{:.3e}",
                    eig.lambda_min(),
                    floor
                ),
            });
        }
        Ok(Self { mat, eig })
    }

    pub fn from_complex_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(m.into_inner())
    }

    /// Builds sum_k values[k] |columns_k><columns_k| from an orthonormal set.
    pub fn from_eigensystem(values: &[f64], vectors: &CMat) -> Result<Self> {
        let d = vectors.nrows();
        matrix::check_same_dim(values.len(), vectors.ncols())?;
        let mut mat = CMat::from_element(d, d, matrix::C_ZERO);
        for (k, &v) in values.iter().enumerate() {
            let col = vectors.column(k);
            mat += (col * col.adjoint()).scale(v);
        }
        Self::new(mat)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::new(identity(d).scale(1.0 / d as f64)).expect("valid by construction")
    }

    pub fn from_pure(phi: &PureState) -> Self {
        Self::new(phi.projector()).expect("rank-one projector is a state")
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn eig(&self) -> &EigH {
        &self.eig
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn trace(&self) -> f64 {
        trace(&self.mat).re
    }

    /// Support at the default cutoff.
    pub fn support(&self) -> Support {
        self.support_with(tol::SUPPORT_CUTOFF)
            .expect("validated state has nonzero trace")
    }

    /// Projector onto eigenvectors with eigenvalue > rel_tol * lambda_max.
    pub fn support_with(&self, rel_tol: f64) -> Result<Support> {
        support_from_eig(&self.eig, rel_tol)
    }

    pub fn numerical_rank(&self) -> usize {
        self.support().rank
    }

    /// The dominant eigenvector as a pure state.
    pub fn top_eigenvector(&self) -> PureState {
        PureState::new(self.eig.vectors.column(0).into_owned())
            .expect("eigenvectors are unit norm")
    }
}

/// Positive semidefinite matrix with trace at most one (an element of the
/// pyramid over the state set with apex zero).
#[derive(Debug, Clone)]
pub struct SubnormalizedState {
    mat: CMat,
    eig: EigH,
}

impl SubnormalizedState {
    pub fn new(mat: CMat) -> Result<Self> {
        require_hermitian(&mat)?;
        let mat = matrix::hermitian_part(&mat);
        let eig = EigH::new(&mat);
        let tr = trace(&mat).re;
        if tr > 1.0 + tol::TAU_TRACE {
            return Err(Error::Validation {
                detail: format!("trace {} exceeds 1 beyond {:e}", tr, tol::TAU_TRACE),
            });
        }
        let floor = tol::scaled(tol::TAU_PSD, eig.lambda_max());
        if eig.lambda_min() < -floor {
            return Err(Error::Validation {
                detail: format!(
                    "eigenvalue {:.3e} below the PSD floor -{:.3e}",
                    eig.lambda_min(),
                    floor
                ),
            });
        }
        Ok(Self { mat, eig })
    }

    pub fn zero(d: usize) -> Self {
        Self::new(CMat::from_element(d, d, matrix::C_ZERO)).expect("zero is subnormalized")
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn eig(&self) -> &EigH {
        &self.eig
    }

    pub fn trace(&self) -> f64 {
        trace(&self.mat).re
    }

    /// Normalized direction a / Tr a, defined away from the apex.
    pub fn normalized(&self) -> Result<DensityOperator> {
        let tr = self.trace();
        if tr <= tol::TAU_TRACE {
            return Err(Error::ZeroMatrix {
                lambda_max: self.eig.lambda_max(),
            });
        }
        DensityOperator::new(self.mat.scale(1.0 / tr))
    }

    pub fn support_with(&self, rel_tol: f64) -> Result<Support> {
        support_from_eig(&self.eig, rel_tol)
    }
}

impl From<DensityOperator> for SubnormalizedState {
    fn from(rho: DensityOperator) -> Self {
        Self {
            mat: rho.mat,
            eig: rho.eig,
        }
    }
}

/// Unit vector representing a rank-one projector; the global phase carries
/// no meaning and is left as constructed.
#[derive(Debug, Clone)]
pub struct PureState {
    vector: CVec,
}

impl PureState {
    pub fn new(vector: CVec) -> Result<Self> {
        let norm = vector.norm();
        if (norm - 1.0).abs() > tol::TAU_NORM {
            return Err(Error::Validation {
                detail: format!("vector norm {} deviates from 1 beyond {:e}", norm, tol::TAU_NORM),
            });
        }
        Ok(Self { vector })
    }

    /// Normalizes a nonzero vector.
    pub fn from_unnormalized(vector: CVec) -> Result<Self> {
        let norm = vector.norm();
        if norm <= tol::TAU_NORM {
            return Err(Error::DirectionZero);
        }
        Ok(Self {
            vector: vector.scale(1.0 / norm),
        })
    }

    pub fn basis_state(d: usize, k: usize) -> Self {
        let mut v = CVec::from_element(d, matrix::C_ZERO);
        v[k] = Complex64::new(1.0, 0.0);
        Self { vector: v }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &CVec {
        &self.vector
    }

    pub fn projector(&self) -> CMat {
        &self.vector * self.vector.adjoint()
    }

    /// <phi | M | phi> for Hermitian M.
    pub fn quadratic_form(&self, m: &CMat) -> f64 {
        (self.vector.adjoint() * m * &self.vector)[(0, 0)].re
    }
}

/// Projector onto span of eigenvectors with eigenvalue > tol * lambda_max,
/// together with the numerical rank.
pub fn support_projector(mat: &CMat, rel_tol: f64) -> Result<Support> {
    require_hermitian(mat)?;
    let eig = EigH::new(mat);
    support_from_eig(&eig, rel_tol)
}
