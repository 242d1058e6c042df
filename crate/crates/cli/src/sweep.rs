//! Parameter sweeps and plot-ready CSV emission.

use facecut_core::constraint::HermitianObservable;
use facecut_core::matrix::CMat;
use facecut_core::optimize::enorm_dual;
use facecut_core::Result;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub parameter: f64,
    pub value: f64,
}

/// E-norm values over `count` evenly spaced E values including both ends.
pub fn sweep_enorm(
    a: &CMat,
    h: &HermitianObservable,
    from: f64,
    to: f64,
    count: usize,
) -> Result<Vec<SweepPoint>> {
    let mut points = Vec::with_capacity(count);
    for k in 0..count {
        let parameter = if count <= 1 {
            from
        } else {
            from + (to - from) * k as f64 / (count - 1) as f64
        };
        let value = enorm_dual(a, h, parameter)?;
        points.push(SweepPoint { parameter, value });
    }
    Ok(points)
}

/// Two-column CSV with a header line; float formatting is the shortest
/// round-trip form, so repeated runs emit identical bytes.
pub fn emit_plot_data(points: &[SweepPoint], parameter_name: &str, value_name: &str) -> String {
    let mut out = String::with_capacity(16 * (points.len() + 1));
    out.push_str(parameter_name);
    out.push(',');
    out.push_str(value_name);
    out.push('\n');
    for p in points {
        out.push_str(&format!("{},{}\n", p.parameter, p.value));
    }
    out
}
