//! Exact and truncated classical examples: faces of the probability
//! simplex with the ratio criterion, Hadamard chains and zeta-density
//! orderings, the cone of polynomials with positive leading coefficient,
//! and the classical-triangle counterexample.

mod poly;
mod simplex;
mod symbolic;
mod triangle;

pub use poly::{poly_face_membership, poly_ri_membership, poly_segment_witness, Polynomial};
pub use simplex::{
    simplex_face_membership, simplex_ri_membership, simplex_segment_witness, FiniteDensity,
};
pub use symbolic::{
    hadamard_transform, ratio_limit_report, RatioReport, SymbolicDensity, Trend,
};
pub use triangle::{triangle_counterexample, TriangleReport};
