//! Problem-file I/O.
//!
//! Schema: `{"dim": d, "state": [[[re,im],...],...], "constraints":
//! [{"observable": ..., "bound": E, "kind": "sublevel"|"level", "name":
//! ...}], "options": {...}}`. All floats are binary64 and survive the
//! save/load round trip bit-exactly; NaN and infinities are rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constraint::{Constraint, ConstraintKind, ConstraintSet, HermitianObservable};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{DensityOperator, SubnormalizedState};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConstraintJson {
    observable: ComplexMatrix,
    bound: f64,
    kind: ConstraintKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

/// Free-form options honored by the CLI; unknown keys are preserved.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ProblemOptions {
    /// Treat the state as an element of the trace-at-most-one pyramid.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub pyramid: bool,
    /// Operator A for norm computations (`enorm`) or objective M (`linmax`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<ComplexMatrix>,
    /// Kraus operators of a channel for `min-entropy`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<ComplexMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(flatten)]
    pub extra: std::collections::BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProblemJson {
    dim: usize,
    state: ComplexMatrix,
    #[serde(default)]
    constraints: Vec<ConstraintJson>,
    #[serde(default)]
    options: ProblemOptions,
}

/// A parsed and validated problem file.
#[derive(Debug, Clone)]
pub struct Problem {
    pub state: ProblemState,
    pub constraints: ConstraintSet,
    pub options: ProblemOptions,
}

/// The state entry, validated against the set it is declared to live in.
#[derive(Debug, Clone)]
pub enum ProblemState {
    Density(DensityOperator),
    Subnormalized(SubnormalizedState),
}

impl Problem {
    pub fn density(&self) -> Result<&DensityOperator> {
        match &self.state {
            ProblemState::Density(rho) => Ok(rho),
            ProblemState::Subnormalized(_) => Err(Error::SchemaError {
                field: "options.pyramid".into(),
                message: "subcommand requires a unit-trace state".into(),
            }),
        }
    }
}

fn schema_err(field: &str, e: Error) -> Error {
    Error::SchemaError {
        field: field.to_string(),
        message: e.to_string(),
    }
}

/// Loads `{state, constraints, options}` from a problem file.
pub fn load_problem(path: impl AsRef<Path>) -> Result<Problem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let raw: ProblemJson = serde_json::from_str(&text).map_err(|source| Error::ParseError {
        path: path.display().to_string(),
        source,
    })?;
    problem_from_json(raw)
}

fn problem_from_json(raw: ProblemJson) -> Result<Problem> {
    if raw.state.dim() != raw.dim {
        return Err(Error::SchemaError {
            field: "state".into(),
            message: format!(
                "state is {}x{} but dim is {}",
                raw.state.dim(),
                raw.state.dim(),
                raw.dim
            ),
        });
    }
    let mut constraints = Vec::with_capacity(raw.constraints.len());
    for (k, c) in raw.constraints.into_iter().enumerate() {
        let field = format!("constraints[{}].observable", k);
        if c.observable.dim() != raw.dim {
            return Err(Error::SchemaError {
                field,
                message: format!("observable dimension {} != {}", c.observable.dim(), raw.dim),
            });
        }
        let obs = HermitianObservable::from_complex_matrix(c.observable, c.name)
            .map_err(|e| schema_err(&field, e))?;
        constraints.push(
            Constraint::new(obs, c.bound, c.kind)
                .map_err(|e| schema_err(&format!("constraints[{}].bound", k), e))?,
        );
    }
    let constraints = ConstraintSet::new(constraints)?;
    let state = if raw.options.pyramid {
        ProblemState::Subnormalized(
            SubnormalizedState::new(raw.state.into_inner()).map_err(|e| schema_err("state", e))?,
        )
    } else {
        ProblemState::Density(
            DensityOperator::new(raw.state.into_inner()).map_err(|e| schema_err("state", e))?,
        )
    };
    Ok(Problem {
        state,
        constraints,
        options: raw.options,
    })
}

/// Serializes a problem file; the inverse of [`load_problem`].
pub fn save_problem(
    path: impl AsRef<Path>,
    state: &ComplexMatrix,
    constraints: &ConstraintSet,
    options: &ProblemOptions,
) -> Result<()> {
    let raw = ProblemJson {
        dim: state.dim(),
        state: state.clone(),
        constraints: constraints
            .iter()
            .map(|c| ConstraintJson {
                observable: ComplexMatrix(c.observable.matrix().clone()),
                bound: c.bound,
                kind: c.kind,
                name: c.observable.name().map(str::to_owned),
            })
            .collect(),
        options: options.clone(),
    };
    write_json(path, &raw)
}

/// Loads a bare matrix file (`[[[re,im],...],...]`).
pub fn load_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::ParseError {
        path: path.display().to_string(),
        source,
    })
}

/// Saves a bare matrix file; `load_matrix` restores it bit-exactly.
pub fn save_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    write_json(path, m)
}

fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::ParseError {
        path: path.display().to_string(),
        source,
    })?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{CMat, CVec};
    use num_complex::Complex64;
    use tempfile::tempdir;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matrix_roundtrip_is_bit_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.json");
        let m = ComplexMatrix::new(CMat::from_fn(4, 4, |i, j| {
            c(
                (1.0 + i as f64).ln() * 0.73 + j as f64,
                (i as f64 - j as f64) / 7.0,
            )
        }))
        .unwrap();
        save_matrix(&path, &m).unwrap();
        let back = load_matrix(&path).unwrap();
        assert!(m
            .as_mat()
            .iter()
            .zip(back.as_mat().iter())
            .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }

    #[test]
    fn non_hermitian_observable_names_field() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("p.json");
        let text = r#"{
            "dim": 2,
            "state": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]],
            "constraints": [
                {"observable": [[[0,0],[1,0]],[[0,0],[0,0]]], "bound": 1.0, "kind": "sublevel"}
            ]
        }"#;
        std::fs::write(&path, text).unwrap();
        match load_problem(&path) {
            Err(Error::SchemaError { field, .. }) => {
                assert_eq!(field, "constraints[0].observable")
            }
            other => panic!("expected SchemaError, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn three_constraint_problem_parses() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("three.json");
        let text = r#"{
            "dim": 2,
            "state": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]],
            "constraints": [
                {"observable": [[[1,0],[1,0]],[[1,0],[1,0]]], "bound": 1.0, "kind": "level", "name": "one_plus_x"},
                {"observable": [[[1,0],[0,-1]],[[0,1],[1,0]]], "bound": 1.0, "kind": "level", "name": "one_plus_y"},
                {"observable": [[[2,0],[0,0]],[[0,0],[0,0]]], "bound": 1.0, "kind": "level", "name": "one_plus_z"}
            ]
        }"#;
        std::fs::write(&path, text).unwrap();
        let problem = load_problem(&path).unwrap();
        assert_eq!(problem.constraints.len(), 3);
        assert!(problem
            .constraints
            .iter()
            .all(|c| c.kind == ConstraintKind::Level));
        let rho = problem.density().unwrap();
        let report = crate::constraint::membership(rho, &problem.constraints).unwrap();
        assert!(report.inside);
    }

    #[test]
    fn parse_error_on_malformed_json() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{ not json").unwrap();
        assert!(matches!(
            load_problem(&path),
            Err(Error::ParseError { .. })
        ));
    }

    #[test]
    fn nan_in_file_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("nan.json");
        let mut m = CMat::from_element(2, 2, c(0.5, 0.0));
        m[(0, 1)] = c(f64::NAN, 0.0);
        // Bypass the constructor to exercise the serializer guard.
        let wrapped = ComplexMatrix(m);
        assert!(save_matrix(&path, &wrapped).is_err());
        let _ = CVec::from_vec(vec![c(1.0, 0.0)]);
    }
}
