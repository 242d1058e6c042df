//! Faces generated by points in the state set, the trace-at-most-one
//! pyramid, and their intersections with expected-value constraints.
//!
//! The face generated by a state is determined by its support: a direction V
//! admits a two-sided step rho +/- eps V inside the set exactly when V is
//! Hermitian, traceless, supported on the range of rho, and annihilated by
//! every active constraint functional. The dimension of that direction space
//! is the dimension of the constrained face.

use serde::Serialize;

use crate::constraint::{membership, ConstraintSet};
use crate::error::{Error, Result};
use crate::matrix::{
    self, check_same_dim, coords_to_hermitian, hermitian_coords, hermitian_part, max_abs,
    real_nullspace, CMat, EigH, RMat, RVec,
};
use crate::state::{DensityOperator, Support, SubnormalizedState};
use crate::tol;

/// Orthonormal basis of the admissible two-sided direction space at a state.
#[derive(Debug, Clone)]
pub struct DirectionSpace {
    /// Support data of the anchor state.
    pub support: Support,
    /// Hermitian, Hilbert-Schmidt-orthonormal d x d directions.
    pub basis: Vec<CMat>,
    /// Dimension m of the space (= basis.len()).
    pub dim: usize,
    /// Indices of the constraints that were treated as active.
    pub active: Vec<usize>,
    /// The constraint-map rank decision had singular values near the cutoff.
    pub near_cutoff: bool,
}

/// Which face of the pyramid a subnormalized state generates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceCase {
    /// Unit-trace state in the base set.
    Density,
    /// The zero operator: the apex, always extreme.
    PyramidApex,
    /// Strictly between apex and base: pyramid over the base face.
    PyramidSegment,
}

/// Dimensions, activity pattern, and extremality verdict for the face
/// generated by a state inside a constrained set.
#[derive(Debug, Clone)]
pub struct FaceReport {
    /// Dimension of the face generated in the unconstrained ambient set.
    pub ambient_dim: usize,
    /// Dimension m of the face in the constrained set.
    pub constrained_dim: usize,
    /// Active constraint indices.
    pub active: Vec<usize>,
    /// m == 0.
    pub extreme: bool,
    /// Numerical rank of the state.
    pub rank: usize,
    /// Support or constraint-rank decisions were close to their cutoffs.
    pub near_degenerate: bool,
    pub case: FaceCase,
    /// Absent only at the pyramid apex.
    pub directions: Option<DirectionSpace>,
}

/// Flat JSON form of a [`FaceReport`].
#[derive(Debug, Clone, Serialize)]
pub struct FaceReportSummary {
    pub ambient_dim: usize,
    pub constrained_dim: usize,
    pub active: Vec<usize>,
    pub extreme: bool,
    pub rank: usize,
    pub near_degenerate: bool,
    pub case: FaceCase,
}

impl FaceReport {
    pub fn summary(&self) -> FaceReportSummary {
        FaceReportSummary {
            ambient_dim: self.ambient_dim,
            constrained_dim: self.constrained_dim,
            active: self.active.clone(),
            extreme: self.extreme,
            rank: self.rank,
            near_degenerate: self.near_degenerate,
            case: self.case,
        }
    }
}

/// Dimension r^2 - 1 of the face generated by a rank-r state in the
/// unconstrained state set.
pub fn face_dimension_unconstrained(rho: &DensityOperator) -> usize {
    let r = rho.numerical_rank();
    r * r - 1
}

/// Whether sigma lies in the face generated by rho, i.e. whether the
/// support of sigma is contained in the support of rho.
pub fn face_membership(sigma: &DensityOperator, rho: &DensityOperator) -> Result<bool> {
    check_same_dim(sigma.dim(), rho.dim())?;
    let p = &rho.support().projector;
    let q = matrix::identity(rho.dim()) - p;
    let outer = max_abs(&(&q * sigma.matrix() * &q));
    let cross = max_abs(&(&q * sigma.matrix() * p));
    Ok(outer <= tol::TAU_PSD && cross <= tol::TAU_PSD)
}

/// Whether sigma lies in the relative algebraic interior of the face
/// generated by rho: mutual face membership, i.e. equal supports.
pub fn ri_membership(sigma: &DensityOperator, rho: &DensityOperator) -> Result<bool> {
    Ok(face_membership(sigma, rho)? && face_membership(rho, sigma)?)
}

/// Brute-force face-membership check: scans negative lambda values for a
/// PSD point (1 - lambda) rho + lambda sigma, which places rho on an open
/// segment inside the set with sigma as an endpoint.
pub fn segment_oracle(
    sigma: &DensityOperator,
    rho: &DensityOperator,
    lambda_grid: &[f64],
) -> Result<bool> {
    check_same_dim(sigma.dim(), rho.dim())?;
    for &lambda in lambda_grid {
        debug_assert!(lambda < 0.0, "segment oracle scans negative lambda only");
        let m = rho.matrix().scale(1.0 - lambda) + sigma.matrix().scale(lambda);
        let eig = EigH::new(&m);
        if eig.lambda_min() >= -tol::scaled(tol::TAU_PSD, eig.lambda_max()) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Log-spaced negative lambda values covering magnitudes 1e-8 through 10.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=60)
        .map(|k| -(10f64.powf(-8.0 + 9.0 * k as f64 / 60.0)))
        .collect()
}

pub(crate) enum ActivityRule {
    /// Level constraints always active; sublevel constraints active when
    /// tight within the slack. Requires membership.
    ByValue,
    /// Every constraint contributes a linear condition (value-preserving
    /// splitting mode).
    AllActive,
}

fn constraint_row(u: &CMat, h: &CMat) -> RVec {
    let w = hermitian_part(&(u.adjoint() * h * u));
    hermitian_coords(&w)
}

pub(crate) fn direction_space_on_support(
    support: Support,
    values: &[f64],
    cs: &ConstraintSet,
    rule: ActivityRule,
    include_trace_row: bool,
) -> DirectionSpace {
    let r = support.rank;
    let u = &support.basis;
    let active: Vec<usize> = match rule {
        ActivityRule::ByValue => cs
            .iter()
            .enumerate()
            .filter(|(k, c)| c.is_active(values[*k]))
            .map(|(k, _)| k)
            .collect(),
        ActivityRule::AllActive => (0..cs.len()).collect(),
    };
    let mut rows: Vec<RVec> = Vec::with_capacity(active.len() + 1);
    if include_trace_row {
        rows.push(hermitian_coords(&matrix::identity(r)));
    }
    for &k in &active {
        rows.push(constraint_row(u, cs.get(k).expect("active index").observable.matrix()));
    }
    let n = r * r;
    let stack = if rows.is_empty() {
        RMat::zeros(0, n)
    } else {
        RMat::from_fn(rows.len(), n, |i, j| rows[i][j])
    };
    let ns = real_nullspace(&stack, tol::SV_CUTOFF);
    let basis: Vec<CMat> = ns
        .basis
        .iter()
        .map(|v| {
            let w = coords_to_hermitian(v, r);
            u * w * u.adjoint()
        })
        .collect();
    #[cfg(debug_assertions)]
    for v in &basis {
        debug_assert!(matrix::trace(v).re.abs() <= 1e-8 || !include_trace_row);
        let q = matrix::identity(v.nrows()) - &support.projector;
        debug_assert!(max_abs(&(&q * v)) <= 1e-8);
    }
    DirectionSpace {
        dim: basis.len(),
        basis,
        support,
        active,
        near_cutoff: ns.near_cutoff,
    }
}

pub(crate) fn direction_space_with_rule(
    rho: &DensityOperator,
    cs: &ConstraintSet,
    rule: ActivityRule,
) -> Result<DirectionSpace> {
    direction_space_with_rule_and_cutoff(rho, cs, rule, tol::SUPPORT_CUTOFF)
}

fn direction_space_with_rule_and_cutoff(
    rho: &DensityOperator,
    cs: &ConstraintSet,
    rule: ActivityRule,
    support_cutoff: f64,
) -> Result<DirectionSpace> {
    let report = membership(rho, cs)?;
    if !report.inside {
        let detail = report
            .entries
            .iter()
            .filter(|e| !e.satisfied)
            .map(|e| format!("constraint {} violated by {:.3e}", e.index, -e.slack))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::NotInSet { detail });
    }
    let values: Vec<f64> = report.entries.iter().map(|e| e.value).collect();
    Ok(direction_space_on_support(
        rho.support_with(support_cutoff)?,
        &values,
        cs,
        rule,
        true,
    ))
}

/// Orthonormal basis of {V Hermitian : Tr V = 0, range(V) in range(rho),
/// Tr(H_k V) = 0 for active k} and its dimension.
pub fn direction_space(rho: &DensityOperator, cs: &ConstraintSet) -> Result<DirectionSpace> {
    direction_space_with_rule(rho, cs, ActivityRule::ByValue)
}

/// Face report for a unit-trace state in the constrained state set.
pub fn face_report(rho: &DensityOperator, cs: &ConstraintSet) -> Result<FaceReport> {
    face_report_with_cutoff(rho, cs, tol::SUPPORT_CUTOFF)
}

/// [`face_report`] with an explicit relative support cutoff.
pub fn face_report_with_cutoff(
    rho: &DensityOperator,
    cs: &ConstraintSet,
    support_cutoff: f64,
) -> Result<FaceReport> {
    let directions =
        direction_space_with_rule_and_cutoff(rho, cs, ActivityRule::ByValue, support_cutoff)?;
    let r = directions.support.rank;
    let ambient_dim = r * r - 1;
    let m = directions.dim;
    let drop = ambient_dim - m;
    debug_assert!(drop <= directions.active.len() && directions.active.len() <= cs.len());
    Ok(FaceReport {
        ambient_dim,
        constrained_dim: m,
        active: directions.active.clone(),
        extreme: m == 0,
        rank: r,
        near_degenerate: directions.support.near_degenerate || directions.near_cutoff,
        case: FaceCase::Density,
        directions: Some(directions),
    })
}

/// Face report for an element of the trace-at-most-one pyramid.
///
/// Apex: the face is {0}. Unit trace: the face lies in the base and the
/// report matches [`face_report`]. Otherwise the face is the pyramid over
/// the base face of the normalized state, and the direction space drops the
/// trace condition because the affine hull contains the apex direction.
pub fn face_report_subnormalized(a: &SubnormalizedState, cs: &ConstraintSet) -> Result<FaceReport> {
    face_report_subnormalized_with_cutoff(a, cs, tol::SUPPORT_CUTOFF)
}

/// [`face_report_subnormalized`] with an explicit relative support cutoff.
pub fn face_report_subnormalized_with_cutoff(
    a: &SubnormalizedState,
    cs: &ConstraintSet,
    support_cutoff: f64,
) -> Result<FaceReport> {
    let report = membership(a, cs)?;
    if !report.inside {
        let detail = report
            .entries
            .iter()
            .filter(|e| !e.satisfied)
            .map(|e| format!("constraint {} violated by {:.3e}", e.index, -e.slack))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::NotInSet { detail });
    }
    let tr = a.trace();
    if tr <= tol::TAU_TRACE {
        return Ok(FaceReport {
            ambient_dim: 0,
            constrained_dim: 0,
            active: report
                .entries
                .iter()
                .filter(|e| e.active)
                .map(|e| e.index)
                .collect(),
            extreme: true,
            rank: 0,
            near_degenerate: false,
            case: FaceCase::PyramidApex,
            directions: None,
        });
    }
    if (tr - 1.0).abs() <= tol::TAU_TRACE {
        let rho = DensityOperator::new(a.matrix().clone())?;
        return face_report_with_cutoff(&rho, cs, support_cutoff);
    }
    // Interior of a segment [0, normalized]: pyramid over the base face.
    let support = a.support_with(support_cutoff)?;
    let values: Vec<f64> = report.entries.iter().map(|e| e.value).collect();
    let directions = direction_space_on_support(support, &values, cs, ActivityRule::ByValue, false);
    let r = directions.support.rank;
    let ambient_dim = r * r;
    let m = directions.dim;
    debug_assert!(ambient_dim - m <= directions.active.len());
    Ok(FaceReport {
        ambient_dim,
        constrained_dim: m,
        active: directions.active.clone(),
        extreme: m == 0,
        rank: r,
        near_degenerate: directions.support.near_degenerate || directions.near_cutoff,
        case: FaceCase::PyramidSegment,
        directions: Some(directions),
    })
}
