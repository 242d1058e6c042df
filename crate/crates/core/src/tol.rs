//! Validation and decision tolerances.
//!
//! Binary64 eigensolvers deliver roughly 1e-13 backward error at the matrix
//! sizes this library targets (d <= 256, typically d <= 8), so 1e-9 leaves
//! four orders of headroom. Tolerances on spectra scale with the largest
//! eigenvalue or singular value of the operator they test.

/// Hermiticity check: max-entry norm of M - M^dagger.
pub const TAU_HERM: f64 = 1e-9;

/// Eigenvalue floor for positive semidefiniteness checks.
pub const TAU_PSD: f64 = 1e-9;

/// Deviation of the trace from its nominal value.
pub const TAU_TRACE: f64 = 1e-9;

/// Unit-norm check for pure-state vectors.
pub const TAU_NORM: f64 = 1e-12;

/// Relative eigenvalue cutoff for support (numerical rank) decisions.
pub const SUPPORT_CUTOFF: f64 = 1e-9;

/// Relative singular-value cutoff in rank-revealing factorizations.
pub const SV_CUTOFF: f64 = 1e-9;

/// Activity/feasibility slack for a constraint with bound `e`.
pub fn tau_act(e: f64) -> f64 {
    1e-9 * e.abs().max(1.0)
}

/// Scale-aware tolerance: `tau` grows with the operator's magnitude.
pub fn scaled(tau: f64, magnitude: f64) -> f64 {
    tau * magnitude.max(1.0)
}
