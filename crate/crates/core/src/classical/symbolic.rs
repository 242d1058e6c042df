//! Symbolic densities on the positive integers with tail evaluators, the
//! Hadamard transform p_H(n) = sqrt(r_n) - sqrt(r_{n+1}), and advisory
//! ratio-trend reports.
//!
//! Boundedness of a ratio sequence is not decidable from finitely many
//! terms, so reports classify a trend and never claim a proof.

use serde::Serialize;

use crate::error::{Error, Result};

/// Number of terms summed before switching to integral remainder bounds.
const ZETA_PARTIAL_TERMS: u64 = 200_000;

/// Infinite-support density family with pointwise and tail evaluators.
#[derive(Debug, Clone)]
pub enum SymbolicDensity {
    /// p(n) = (1 - a) a^(n-1); tails r_n = a^(n-1).
    Geometric { ratio: f64 },
    /// p(n) = n^(-s) / zeta(s); `norm` caches zeta(s) at construction.
    Zeta { s: f64, norm: f64 },
    /// k-fold Hadamard transform of the base family; tails are the
    /// 2^k-th roots of the base tails.
    HadamardIterate { base: Box<SymbolicDensity>, k: u32 },
}

impl SymbolicDensity {
    pub fn geometric(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Validation {
                detail: format!("geometric ratio {} outside (0, 1)", ratio),
            });
        }
        Ok(Self::Geometric { ratio })
    }

    pub fn zeta(s: f64) -> Result<Self> {
        if !(s > 1.0) {
            return Err(Error::Validation {
                detail: format!("zeta exponent {} must exceed 1", s),
            });
        }
        let (lo, hi) = zeta_tail_raw(s, 1);
        Ok(Self::Zeta {
            s,
            norm: 0.5 * (lo + hi),
        })
    }

    /// p(n), in binary64.
    pub fn evaluate(&self, n: u64) -> f64 {
        debug_assert!(n >= 1);
        match self {
            Self::Geometric { ratio } => (1.0 - ratio) * ratio.powi(n as i32 - 1),
            Self::Zeta { s, norm } => (n as f64).powf(-s) / norm,
            Self::HadamardIterate { .. } => {
                let (lo_n, hi_n) = self.tail(n).expect("iterate tails exist");
                let (lo_n1, hi_n1) = self.tail(n + 1).expect("iterate tails exist");
                0.5 * (lo_n + hi_n) - 0.5 * (lo_n1 + hi_n1)
            }
        }
    }

    /// Tail r_n = sum_{m >= n} p(m) as an enclosing interval [lo, hi].
    pub fn tail(&self, n: u64) -> Result<(f64, f64)> {
        debug_assert!(n >= 1);
        match self {
            Self::Geometric { ratio } => {
                let r = ratio.powi(n as i32 - 1);
                Ok((r, r))
            }
            Self::Zeta { s, norm } => {
                let (lo, hi) = zeta_tail_raw(*s, n);
                Ok((lo / norm, hi / norm))
            }
            Self::HadamardIterate { base, k } => {
                // Telescoping: the tail of the transform is the square root
                // of the base tail, so k iterations take the 2^k-th root.
                let (mut lo, mut hi) = base.tail(n)?;
                for _ in 0..*k {
                    lo = lo.sqrt();
                    hi = hi.sqrt();
                }
                Ok((lo, hi))
            }
        }
    }

    /// How many Hadamard transforms sit on top of the base family.
    pub fn hadamard_depth(&self) -> u32 {
        match self {
            Self::HadamardIterate { k, .. } => *k,
            _ => 0,
        }
    }
}

/// Partial sum of m^(-s) for m in [n, n + ZETA_PARTIAL_TERMS) plus integral
/// remainder bounds; the true tail lies inside the returned interval.
fn zeta_tail_raw(s: f64, n: u64) -> (f64, f64) {
    let cutoff = n + ZETA_PARTIAL_TERMS;
    let mut partial = 0.0f64;
    // Summing ascending keeps the small terms from being absorbed.
    for m in (n..cutoff).rev() {
        partial += (m as f64).powf(-s);
    }
    let integral = |x: f64| x.powf(1.0 - s) / (s - 1.0);
    (partial + integral(cutoff as f64), partial + integral((cutoff - 1) as f64))
}

/// Hadamard transform: p_H(n) = p(n) / (sqrt(r_n) + sqrt(r_{n+1})) =
/// sqrt(r_n) - sqrt(r_{n+1}). Fails with `TailUnavailable` if the family
/// cannot produce tails.
pub fn hadamard_transform(p: &SymbolicDensity) -> Result<SymbolicDensity> {
    // Probe the tail evaluator once so an unusable family fails loudly.
    p.tail(1).map_err(|e| Error::TailUnavailable {
        detail: e.to_string(),
    })?;
    Ok(match p {
        SymbolicDensity::HadamardIterate { base, k } => SymbolicDensity::HadamardIterate {
            base: base.clone(),
            k: k + 1,
        },
        other => SymbolicDensity::HadamardIterate {
            base: Box::new(other.clone()),
            k: 1,
        },
    })
}

/// Advisory trend of the ratio sequence q(n)/p(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Bounded,
    Diverging,
    Inconclusive,
}

/// Windowed ratio report over n <= n_max.
#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub sup: f64,
    pub argmax: u64,
    pub early_max: f64,
    pub late_max: f64,
    pub trend: Trend,
}

/// Evaluates max q(n)/p(n) over n <= n_max and classifies the trend by
/// comparing the windows [1, n_max/2] and (n_max/2, n_max] with a factor-2
/// hysteresis. The classification is advisory; it is never a proof.
pub fn ratio_limit_report(q: &SymbolicDensity, p: &SymbolicDensity, n_max: u64) -> RatioReport {
    debug_assert!(n_max >= 2);
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = 1;
    let mut early_max = f64::NEG_INFINITY;
    let mut late_max = f64::NEG_INFINITY;
    let half = n_max / 2;
    for n in 1..=n_max {
        let ratio = q.evaluate(n) / p.evaluate(n);
        if ratio > sup {
            sup = ratio;
            argmax = n;
        }
        if n <= half {
            early_max = early_max.max(ratio);
        } else {
            late_max = late_max.max(ratio);
        }
    }
    let trend = if late_max >= 2.0 * early_max * (1.0 - 1e-9) {
        Trend::Diverging
    } else if late_max <= early_max * (1.0 + 1e-9) {
        Trend::Bounded
    } else {
        Trend::Inconclusive
    };
    RatioReport {
        sup,
        argmax,
        early_max,
        late_max,
        trend,
    }
}
