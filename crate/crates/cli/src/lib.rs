//! Library surface of the facecut CLI: run configuration, verification
//! suites, and sweep/plot emission. The binary in `main.rs` is a thin
//! dispatcher over these functions.

pub mod config;
pub mod report;
pub mod suites;
pub mod sweep;

pub use config::{OutputFormat, RunConfig};
pub use report::{VerificationReport, Violation};
pub use suites::{counterexample_checks, run_instance, verify_suite, Suite};
pub use sweep::{emit_plot_data, sweep_enorm, SweepPoint};
