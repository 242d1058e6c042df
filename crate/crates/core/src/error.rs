//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is numerically zero (largest eigenvalue {lambda_max:.3e})")]
    ZeroMatrix { lambda_max: f64 },

    #[error("parse error in {path}: {source}")]
    ParseError {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("schema error at {field}: {message}")]
    SchemaError { field: String, message: String },

    #[error("state does not lie in the constrained set: {detail}")]
    NotInSet { detail: String },

    #[error("direction leaves the state's range (residual {residual:.3e})")]
    DirectionUnsupported { residual: f64 },

    #[error("direction is numerically zero")]
    DirectionZero,

    #[error("mixed state of rank {rank} is an extreme point of the constrained set; no split direction exists")]
    ExtremeMixedState { rank: usize },

    #[error("affine dependency solve is ill-conditioned (smallest singular value {sigma_min:.3e})")]
    NumericalDependencyFailure { sigma_min: f64 },

    #[error("infeasible constraint: {detail}")]
    Infeasible { detail: String },

    #[error("optimizer failed to converge: {detail}")]
    NoConvergence { detail: String },

    #[error("rank {rank} out of range for dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("dimension {dim} does not factor as {d_a} x {d_b}")]
    BadFactorization { dim: usize, d_a: usize, d_b: usize },

    #[error("polynomial is not in the cone: {detail}")]
    InputNotInCone { detail: String },

    #[error("density family has no tail evaluator: {detail}")]
    TailUnavailable { detail: String },

    #[error("validation failed: {detail}")]
    Validation { detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
