//! Verification reports with reproducible violation records.

use serde::Serialize;

/// A single failed instance with everything needed to replay it.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    /// Instance stream index within the suite.
    pub stream: u64,
    pub message: String,
    /// Standalone reproduction data: suite, seed, stream, and the full
    /// problem in the CLI's input schema where applicable.
    pub reproducer: serde_json::Value,
}

/// Suite outcome. Wall time is measured but kept out of the serialized
/// report so identical runs stay byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub instances: usize,
    pub violations: Vec<Violation>,
    pub pass: bool,
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl VerificationReport {
    pub fn new(suite: &str, instances: usize, violations: Vec<Violation>, wall_time_ms: u128) -> Self {
        Self {
            suite: suite.to_string(),
            instances,
            pass: violations.is_empty(),
            violations,
            wall_time_ms,
        }
    }
}
