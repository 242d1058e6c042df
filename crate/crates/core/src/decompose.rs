//! Constructive pure-state decomposition of constrained states.
//!
//! A state of rank r >= 2 inside a set cut out by at most two expected-value
//! constraints always admits a traceless, constraint-annihilating direction
//! on its support. Stepping to the positive-semidefinite boundary on both
//! sides splits the state into two children of strictly smaller rank with
//! identical constraint values; recursion reaches pure states in at most
//! r - 1 levels, and a Caratheodory pass caps the component count at d^2.

use serde::Serialize;

use crate::constraint::{membership, ConstraintKind, ConstraintSet, HermitianObservable};
use crate::error::{Error, Result};
use crate::face::{direction_space_with_rule, ActivityRule};
use crate::matrix::{
    self, check_same_dim, hermitian_coords, hermitian_part, max_abs, real_nullspace, trace_product,
    CMat, RMat, RVec,
};
use crate::state::{DensityOperator, PureState};
use crate::tol;

/// Weighted pure component with its per-constraint expected values.
#[derive(Debug, Clone)]
pub struct Component {
    pub weight: f64,
    pub state: PureState,
    /// Tr(H_k sigma) in constraint order.
    pub values: Vec<f64>,
}

/// Convex combination of pure states reconstructing the input, with
/// certificate data.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub components: Vec<Component>,
    /// Max-norm distance between the input and the reassembled mixture.
    pub residual: f64,
    /// Component count before Caratheodory reduction.
    pub reduced_from: usize,
    /// Total weight removed by the weight floor.
    pub dropped_mass: f64,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Sum of p_i |sigma_i><sigma_i|.
    pub fn reassemble(&self, d: usize) -> CMat {
        let mut acc = CMat::from_element(d, d, matrix::C_ZERO);
        for comp in &self.components {
            acc += comp.state.projector().scale(comp.weight);
        }
        acc
    }
}

/// Maximal two-sided step sizes keeping rho + t V positive semidefinite.
///
/// Works on the support subspace: with rho = U Lambda U^dagger, the pencil
/// rho + t V is PSD iff I + t W is, where W = Lambda^(-1/2) U^dagger V U
/// Lambda^(-1/2). Both extreme eigenvalues of W are nonzero with opposite
/// signs whenever V is traceless, nonzero, and supported on range(rho).
pub fn step_to_boundary(rho: &DensityOperator, v: &CMat) -> Result<(f64, f64)> {
    check_same_dim(rho.dim(), v.nrows())?;
    let norm_v = max_abs(v);
    if norm_v <= tol::TAU_NORM {
        return Err(Error::DirectionZero);
    }
    let support = rho.support();
    let q = matrix::identity(rho.dim()) - &support.projector;
    let residual = max_abs(&(&q * v * &q)).max(max_abs(&(&q * v * &support.projector)));
    if residual > tol::scaled(tol::TAU_PSD, norm_v) {
        return Err(Error::DirectionUnsupported { residual });
    }
    let u = &support.basis;
    let lambda_inv_sqrt: Vec<f64> = rho.eigenvalues()[..support.rank]
        .iter()
        .map(|&l| 1.0 / l.sqrt())
        .collect();
    let mut w = hermitian_part(&(u.adjoint() * v * u));
    for i in 0..support.rank {
        for j in 0..support.rank {
            w[(i, j)] *= lambda_inv_sqrt[i] * lambda_inv_sqrt[j];
        }
    }
    let eig = matrix::EigH::new(&w);
    let (lo, hi) = (eig.lambda_min(), eig.lambda_max());
    debug_assert!(
        lo < 0.0 && hi > 0.0,
        "weighted direction must be sign-indefinite (got [{lo}, {hi}])"
    );
    if lo >= 0.0 || hi <= 0.0 {
        return Err(Error::DirectionUnsupported { residual: 0.0 });
    }
    Ok((1.0 / (-lo), 1.0 / hi))
}

/// One splitting step: rho = p rho_plus + q rho_minus along the first
/// admissible direction, with every constraint value preserved exactly.
///
/// All constraints contribute a linear condition regardless of activity, so
/// both children inherit the parent's expected values and hence stay
/// feasible without slack bookkeeping.
pub fn split_once(
    rho: &DensityOperator,
    cs: &ConstraintSet,
) -> Result<((f64, DensityOperator), (f64, DensityOperator))> {
    let rank = rho.numerical_rank();
    if rank < 2 {
        return Err(Error::ExtremeMixedState { rank });
    }
    let ds = direction_space_with_rule(rho, cs, ActivityRule::AllActive)?;
    if ds.basis.is_empty() {
        return Err(Error::ExtremeMixedState { rank });
    }
    // Deterministic tie-break: the most-null basis vector of the
    // rank-revealing factorization.
    let v = &ds.basis[0];
    let (t_plus, t_minus) = step_to_boundary(rho, v)?;
    let plus = DensityOperator::new(rho.matrix() + v.scale(t_plus))?;
    let minus = DensityOperator::new(rho.matrix() - v.scale(t_minus))?;
    let p = t_minus / (t_plus + t_minus);
    let q = t_plus / (t_plus + t_minus);
    debug_assert!(
        max_abs(&(plus.matrix().scale(p) + minus.matrix().scale(q) - rho.matrix())) <= 1e-12
    );
    Ok(((p, plus), (q, minus)))
}

/// Weight floor below which components are dropped and the rest
/// renormalized.
const WEIGHT_FLOOR: f64 = 1e-12;

/// Decomposes a constrained state into pure states preserving every
/// constraint value, then reduces to at most d^2 components.
///
/// Guaranteed to succeed for at most two constraints; with three or more the
/// constrained set may have mixed extreme points, reported as
/// [`Error::ExtremeMixedState`].
pub fn pure_decompose(rho: &DensityOperator, cs: &ConstraintSet) -> Result<Decomposition> {
    let report = membership(rho, cs)?;
    if !report.inside {
        return Err(Error::NotInSet {
            detail: "decomposition input violates its constraint set".into(),
        });
    }
    let d = rho.dim();
    let mut stack: Vec<(f64, DensityOperator)> = vec![(1.0, rho.clone())];
    let mut leaves: Vec<(f64, PureState)> = Vec::new();
    while let Some((weight, node)) = stack.pop() {
        if node.numerical_rank() <= 1 {
            leaves.push((weight, node.top_eigenvector()));
            continue;
        }
        let ((p, plus), (q, minus)) = split_once(&node, cs)?;
        stack.push((weight * q, minus));
        stack.push((weight * p, plus));
    }
    let reduced_from = leaves.len();
    let mut dropped_mass = 0.0;
    let reduced = if leaves.len() > d * d {
        caratheodory_reduce(leaves)?
    } else {
        leaves
    };
    let mut kept: Vec<(f64, PureState)> = Vec::with_capacity(reduced.len());
    for (w, phi) in reduced {
        if w < WEIGHT_FLOOR {
            dropped_mass += w;
        } else {
            kept.push((w, phi));
        }
    }
    let total: f64 = kept.iter().map(|(w, _)| *w).sum();
    let components: Vec<Component> = kept
        .into_iter()
        .map(|(w, phi)| {
            let values = cs
                .iter()
                .map(|c| phi.quadratic_form(c.observable.matrix()))
                .collect();
            Ok(Component {
                weight: w / total,
                state: phi,
                values,
            })
        })
        .collect::<Result<_>>()?;
    let decomposition = Decomposition {
        residual: 0.0,
        components,
        reduced_from,
        dropped_mass,
    };
    let residual = max_abs(&(decomposition.reassemble(d) - rho.matrix()));
    Ok(Decomposition {
        residual,
        ..decomposition
    })
}

/// Removes affine dependencies among the projectors until at most d^2
/// components remain; only weights change, never the states.
pub fn caratheodory_reduce(
    mut components: Vec<(f64, PureState)>,
) -> Result<Vec<(f64, PureState)>> {
    if components.is_empty() {
        return Ok(components);
    }
    let d = components[0].1.dim();
    let target = d * d;
    while components.len() > target {
        let n = components.len();
        // Stack the real coordinates of each projector, plus an all-ones
        // row; a null vector is an affine dependency among the projectors.
        let coords: Vec<RVec> = components
            .iter()
            .map(|(_, phi)| hermitian_coords(&phi.projector()))
            .collect();
        let mut stack = RMat::zeros(d * d + 1, n);
        for (j, v) in coords.iter().enumerate() {
            for i in 0..d * d {
                stack[(i, j)] = v[i];
            }
            stack[(d * d, j)] = 1.0;
        }
        let svd = stack.clone().svd(false, true);
        let sigma_min = svd
            .singular_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        if sigma_min > 1e-8 * sigma_max {
            return Err(Error::NumericalDependencyFailure { sigma_min });
        }
        let ns = real_nullspace(&stack, tol::SV_CUTOFF.max(sigma_min * 2.0 / sigma_max));
        let Some(dep) = ns.basis.first() else {
            return Err(Error::NumericalDependencyFailure { sigma_min });
        };
        // Shift weights along the dependency until the first one vanishes.
        let mut dep = dep.clone();
        if dep.iter().all(|&c| c <= 0.0) {
            dep.neg_mut();
        }
        let (drop_idx, theta) = components
            .iter()
            .enumerate()
            .filter(|(j, _)| dep[*j] > 1e-14)
            .map(|(j, (w, _))| (j, w / dep[j]))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite ratios"))
            .expect("a positive dependency coefficient exists");
        for (j, (w, _)) in components.iter_mut().enumerate() {
            *w -= theta * dep[j];
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        components[drop_idx].0 = 0.0;
        components.retain(|(w, _)| *w > WEIGHT_FLOOR);
        if components.len() >= n {
            // No progress; report rather than loop.
            return Err(Error::NumericalDependencyFailure { sigma_min });
        }
    }
    Ok(components)
}

/// Which tensor factor to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of a (d_a * d_b)-dimensional matrix over one factor,
/// row-major composite index a * d_b + b.
pub fn partial_trace(mat: &CMat, d_a: usize, d_b: usize, traced: Subsystem) -> Result<CMat> {
    let d = mat.nrows();
    if d_a * d_b != d || mat.ncols() != d {
        return Err(Error::BadFactorization { dim: d, d_a, d_b });
    }
    Ok(match traced {
        Subsystem::B => CMat::from_fn(d_a, d_a, |a, a2| {
            (0..d_b).map(|b| mat[(a * d_b + b, a2 * d_b + b)]).sum()
        }),
        Subsystem::A => CMat::from_fn(d_b, d_b, |b, b2| {
            (0..d_a).map(|a| mat[(a * d_b + b, a * d_b + b2)]).sum()
        }),
    })
}

/// Per-component marginal expectations in the bipartite certificate.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalValues {
    pub value_a: f64,
    pub value_b: f64,
}

/// Bipartite decomposition certificate: every component has the same
/// marginal expectations as the input.
#[derive(Debug, Clone)]
pub struct BipartiteDecomposition {
    pub decomposition: Decomposition,
    pub e_a: f64,
    pub e_b: f64,
    pub marginals: Vec<MarginalValues>,
}

/// Decomposes a bipartite state into pure states with the input's marginal
/// expected values of H_A and H_B, via the two level constraints
/// (H_A (x) 1, E_A) and (1 (x) H_B, E_B).
pub fn bipartite_decompose(
    rho_ab: &DensityOperator,
    d_a: usize,
    d_b: usize,
    h_a: &HermitianObservable,
    h_b: &HermitianObservable,
) -> Result<BipartiteDecomposition> {
    check_same_dim(h_a.dim(), d_a)?;
    check_same_dim(h_b.dim(), d_b)?;
    let rho_a = partial_trace(rho_ab.matrix(), d_a, d_b, Subsystem::B)?;
    let rho_b = partial_trace(rho_ab.matrix(), d_a, d_b, Subsystem::A)?;
    let e_a = trace_product(h_a.matrix(), &rho_a).re;
    let e_b = trace_product(h_b.matrix(), &rho_b).re;
    let lifted_a = HermitianObservable::new(
        matrix::kron(h_a.matrix(), &matrix::identity(d_b)),
        Some("H_A (x) 1".into()),
    )?;
    let lifted_b = HermitianObservable::new(
        matrix::kron(&matrix::identity(d_a), h_b.matrix()),
        Some("1 (x) H_B".into()),
    )?;
    let cs = ConstraintSet::new(vec![
        crate::constraint::Constraint::new(lifted_a, e_a, ConstraintKind::Level)?,
        crate::constraint::Constraint::new(lifted_b, e_b, ConstraintKind::Level)?,
    ])?;
    let decomposition = pure_decompose(rho_ab, &cs)?;
    let marginals = decomposition
        .components
        .iter()
        .map(|comp| {
            let proj = comp.state.projector();
            let sig_a = partial_trace(&proj, d_a, d_b, Subsystem::B)?;
            let sig_b = partial_trace(&proj, d_a, d_b, Subsystem::A)?;
            Ok(MarginalValues {
                value_a: trace_product(h_a.matrix(), &sig_a).re,
                value_b: trace_product(h_b.matrix(), &sig_b).re,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BipartiteDecomposition {
        decomposition,
        e_a,
        e_b,
        marginals,
    })
}
