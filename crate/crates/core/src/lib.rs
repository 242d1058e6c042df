//! Convex geometry of density matrices under expected-value constraints:
//! faces generated by states, constructive pure-state decompositions,
//! constrained suprema and operator norms, and exact classical examples.

pub mod classical;
pub mod constraint;
pub mod decompose;
pub mod error;
pub mod face;
pub mod io;
pub mod matrix;
pub mod optimize;
pub mod random;
pub mod state;
pub mod tol;

pub use constraint::{
    expected_value, expected_value_pure, membership, Constraint, ConstraintKind, ConstraintSet,
    HermitianObservable, MembershipReport,
};
pub use error::{Error, Result};
pub use face::{
    direction_space, face_dimension_unconstrained, face_membership, face_report,
    face_report_subnormalized, ri_membership, segment_oracle, DirectionSpace, FaceReport,
};
pub use matrix::{CMat, CVec, ComplexMatrix};
pub use state::{support_projector, DensityOperator, PureState, SubnormalizedState, Support};
