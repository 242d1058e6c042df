//! Run configuration shared by the verification suites and the CLI.

use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Everything a suite run depends on; identical configs and inputs produce
/// byte-identical reports.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    /// Overrides the default support/rank tolerance where applicable.
    pub tol: Option<f64>,
    pub restarts: u32,
    pub samples: usize,
    pub dims: Vec<usize>,
    /// Pin the constraint count; None samples it per instance.
    pub ell: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Run only this instance stream (reproducer mode).
    pub instance: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: None,
            restarts: 32,
            samples: 10_000,
            dims: vec![2, 3, 4],
            ell: None,
            output: None,
            format: OutputFormat::Json,
            instance: None,
        }
    }
}

/// Rayon pool capped by the FACECUT_THREADS environment variable.
pub fn thread_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("FACECUT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        builder = builder.num_threads(n.max(1));
    }
    builder.build().expect("thread pool")
}
