//! Observables, expected values, and constraint sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    self, check_same_dim, max_abs, require_hermitian, trace_product, CMat, ComplexMatrix, EigH,
};
use crate::state::{DensityOperator, PureState, SubnormalizedState};
use crate::tol;

/// Hermitian matrix H with the expected-value functional rho -> Tr(H rho).
///
/// Positivity is not required; any Hermitian observable induces a valid
/// affine functional on states.
#[derive(Debug, Clone)]
pub struct HermitianObservable {
    mat: CMat,
    name: Option<String>,
}

impl HermitianObservable {
    pub fn new(mat: CMat, name: Option<String>) -> Result<Self> {
        require_hermitian(&mat)?;
        if mat.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Validation {
                detail: "observable contains non-finite entries".into(),
            });
        }
        Ok(Self {
            mat: matrix::hermitian_part(&mat),
            name,
        })
    }

    pub fn from_complex_matrix(m: ComplexMatrix, name: Option<String>) -> Result<Self> {
        Self::new(m.into_inner(), name)
    }

    pub fn identity(d: usize) -> Self {
        Self::new(matrix::identity(d), None).expect("identity is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn lambda_min(&self) -> f64 {
        EigH::new(&self.mat).lambda_min()
    }

    pub fn lambda_max(&self) -> f64 {
        EigH::new(&self.mat).lambda_max()
    }
}

/// Anything with a matrix representation that expected values read from.
pub trait StateLike {
    fn state_matrix(&self) -> &CMat;
    fn state_dim(&self) -> usize {
        self.state_matrix().nrows()
    }
    /// Trace norm; states are PSD so this is the trace.
    fn trace_norm(&self) -> f64;
}

impl StateLike for DensityOperator {
    fn state_matrix(&self) -> &CMat {
        self.matrix()
    }
    fn trace_norm(&self) -> f64 {
        self.trace()
    }
}

impl StateLike for SubnormalizedState {
    fn state_matrix(&self) -> &CMat {
        self.matrix()
    }
    fn trace_norm(&self) -> f64 {
        self.trace()
    }
}

/// Re(Tr(H rho)); the imaginary residual of the trace is asserted tiny.
pub fn expected_value<S: StateLike>(rho: &S, h: &HermitianObservable) -> Result<f64> {
    check_same_dim(rho.state_dim(), h.dim())?;
    let t = trace_product(h.matrix(), rho.state_matrix());
    let scale = max_abs(h.matrix()) * h.dim() as f64 * rho.trace_norm();
    debug_assert!(
        t.im.abs() <= 1e-12 * scale.max(1.0),
        "imaginary residual {:.3e} too large",
        t.im
    );
    Ok(t.re)
}

/// <phi | H | phi> for a pure state.
pub fn expected_value_pure(phi: &PureState, h: &HermitianObservable) -> Result<f64> {
    check_same_dim(phi.dim(), h.dim())?;
    Ok(phi.quadratic_form(h.matrix()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Sublevel,
    Level,
}

/// A single expected-value constraint Tr(H rho) <= E or = E.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub observable: HermitianObservable,
    pub bound: f64,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn new(observable: HermitianObservable, bound: f64, kind: ConstraintKind) -> Result<Self> {
        if !bound.is_finite() {
            return Err(Error::Validation {
                detail: "constraint bound must be finite".into(),
            });
        }
        Ok(Self {
            observable,
            bound,
            kind,
        })
    }

    pub fn sublevel(observable: HermitianObservable, bound: f64) -> Result<Self> {
        Self::new(observable, bound, ConstraintKind::Sublevel)
    }

    pub fn level(observable: HermitianObservable, bound: f64) -> Result<Self> {
        Self::new(observable, bound, ConstraintKind::Level)
    }

    /// Whether `value` satisfies the constraint within the activity slack.
    pub fn is_satisfied(&self, value: f64) -> bool {
        let slack = tol::tau_act(self.bound);
        match self.kind {
            ConstraintKind::Sublevel => value <= self.bound + slack,
            ConstraintKind::Level => (value - self.bound).abs() <= slack,
        }
    }

    /// Level constraints are always active; a sublevel constraint is active
    /// when it holds with equality within the slack.
    pub fn is_active(&self, value: f64) -> bool {
        match self.kind {
            ConstraintKind::Level => true,
            ConstraintKind::Sublevel => (value - self.bound).abs() <= tol::tau_act(self.bound),
        }
    }
}

/// Ordered list of constraints sharing one dimension.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSet {
    constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(constraints: Vec<Constraint>) -> Result<Self> {
        if let Some(first) = constraints.first() {
            let d = first.observable.dim();
            for c in &constraints {
                check_same_dim(d, c.observable.dim())?;
            }
        }
        Ok(Self { constraints })
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.constraints.first().map(|c| c.observable.dim())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Constraint> {
        self.constraints.iter()
    }

    pub fn get(&self, k: usize) -> Option<&Constraint> {
        self.constraints.get(k)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Concatenation (for the face intersection law).
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut all = self.constraints.clone();
        all.extend(other.constraints.iter().cloned());
        Self::new(all)
    }

    /// Expected values Tr(H_k rho) in constraint order.
    pub fn values<S: StateLike>(&self, rho: &S) -> Result<Vec<f64>> {
        self.iter()
            .map(|c| expected_value(rho, &c.observable))
            .collect()
    }
}

/// Per-constraint slack E_k - Tr(H_k rho) with satisfaction/activity flags.
#[derive(Debug, Clone, Serialize)]
pub struct SlackEntry {
    pub index: usize,
    pub name: Option<String>,
    pub kind: ConstraintKind,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub active: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub inside: bool,
    pub entries: Vec<SlackEntry>,
}

/// Checks rho against every constraint and reports slacks.
pub fn membership<S: StateLike>(rho: &S, cs: &ConstraintSet) -> Result<MembershipReport> {
    if let Some(d) = cs.dim() {
        check_same_dim(rho.state_dim(), d)?;
    }
    let mut entries = Vec::with_capacity(cs.len());
    let mut inside = true;
    for (index, c) in cs.iter().enumerate() {
        let value = expected_value(rho, &c.observable)?;
        let satisfied = c.is_satisfied(value);
        inside &= satisfied;
        entries.push(SlackEntry {
            index,
            name: c.observable.name().map(str::to_owned),
            kind: c.kind,
            value,
            bound: c.bound,
            slack: c.bound - value,
            satisfied,
            active: c.is_active(value),
        });
    }
    Ok(MembershipReport { inside, entries })
}
