//! Randomized theorem-verification suites. Every instance derives its
//! generator from (seed, stream), so violations replay standalone and the
//! fan-out schedule cannot change the report.

use std::time::Instant;

use facecut_core::classical::triangle_counterexample;
use facecut_core::constraint::{
    expected_value, Constraint, ConstraintKind, ConstraintSet, HermitianObservable,
};
use facecut_core::decompose::pure_decompose;
use facecut_core::face::face_report;
use facecut_core::matrix::{identity, CMat, CVec, ComplexMatrix, EigH};
use facecut_core::optimize::{enorm_dual, enorm_pure, von_neumann_entropy};
use facecut_core::random::{
    random_constraints, random_kinds, random_operator, random_observable, random_state,
};
use facecut_core::state::DensityOperator;
use facecut_core::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{thread_pool, RunConfig};
use crate::report::{VerificationReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Purity,
    DimDrop,
    Decompose,
    Enorm,
    Jensen,
    Counterexamples,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Purity => "purity",
            Suite::DimDrop => "dim-drop",
            Suite::Decompose => "decompose",
            Suite::Enorm => "enorm",
            Suite::Jensen => "jensen",
            Suite::Counterexamples => "counterexamples",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "purity" => Suite::Purity,
            "dim-drop" | "dimdrop" => Suite::DimDrop,
            "decompose" => Suite::Decompose,
            "enorm" => Suite::Enorm,
            "jensen" => Suite::Jensen,
            "counterexamples" => Suite::Counterexamples,
            _ => return None,
        })
    }

    pub const ALL: [Suite; 6] = [
        Suite::Purity,
        Suite::DimDrop,
        Suite::Decompose,
        Suite::Enorm,
        Suite::Jensen,
        Suite::Counterexamples,
    ];
}

fn rng_for(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream ids carry the dimension in the high bits so every (dim, index)
/// pair is replayable from the id alone.
fn stream_id(dim: usize, index: u64) -> u64 {
    ((dim as u64) << 48) | index
}

fn stream_dim(stream: u64) -> usize {
    (stream >> 48) as usize
}

fn problem_value(rho: &DensityOperator, cs: &ConstraintSet) -> serde_json::Value {
    json!({
        "dim": rho.dim(),
        "state": ComplexMatrix(rho.matrix().clone()),
        "constraints": cs.iter().map(|c| json!({
            "observable": ComplexMatrix(c.observable.matrix().clone()),
            "bound": c.bound,
            "kind": c.kind,
        })).collect::<Vec<_>>(),
    })
}

fn reproducer(suite: Suite, seed: u64, stream: u64, problem: Option<serde_json::Value>) -> serde_json::Value {
    let mut value = json!({
        "suite": suite.name(),
        "seed": seed,
        "stream": stream,
    });
    if let Some(p) = problem {
        value["problem"] = p;
    }
    value
}

/// Runs one suite instance; None means the instance passed.
pub fn run_instance(suite: Suite, seed: u64, stream: u64) -> Option<Violation> {
    match suite {
        Suite::Purity => purity_instance(seed, stream),
        Suite::DimDrop => dim_drop_instance(seed, stream, None),
        Suite::Decompose => decompose_instance(seed, stream),
        Suite::Enorm => enorm_instance(seed, stream),
        Suite::Jensen => jensen_instance(seed, stream),
        Suite::Counterexamples => counterexample_checks(seed).into_iter().next(),
    }
}

fn violation(
    suite: Suite,
    seed: u64,
    stream: u64,
    message: String,
    problem: Option<serde_json::Value>,
) -> Violation {
    Violation {
        stream,
        message,
        reproducer: reproducer(suite, seed, stream, problem),
    }
}

fn purity_instance(seed: u64, stream: u64) -> Option<Violation> {
    let mut rng = rng_for(seed, stream);
    let d = stream_dim(stream);
    let rank = rng.gen_range(1..=d);
    let rho = random_state(d, rank, &mut rng).expect("valid rank");
    let ell = rng.gen_range(0..=2);
    let kinds = random_kinds(ell, &mut rng);
    let cs = random_constraints(d, &kinds, Some(&rho), &mut rng).expect("anchored set");
    let report = match face_report(&rho, &cs) {
        Ok(r) => r,
        Err(e) => {
            return Some(violation(
                Suite::Purity,
                seed,
                stream,
                format!("face_report failed: {e}"),
                Some(problem_value(&rho, &cs)),
            ))
        }
    };
    if report.extreme {
        let second = rho.eigenvalues().get(1).copied().unwrap_or(0.0);
        if report.rank != 1 || second.abs() > 1e-8 {
            return Some(violation(
                Suite::Purity,
                seed,
                stream,
                format!(
                    "extreme point with rank {} (second eigenvalue {:.3e})",
                    report.rank, second
                ),
                Some(problem_value(&rho, &cs)),
            ));
        }
    }
    None
}

fn dim_drop_instance(seed: u64, stream: u64, pinned_ell: Option<usize>) -> Option<Violation> {
    let mut rng = rng_for(seed, stream);
    let d = stream_dim(stream);
    let rank = rng.gen_range(1..=d);
    let rho = random_state(d, rank, &mut rng).expect("valid rank");
    let ell = pinned_ell.unwrap_or_else(|| rng.gen_range(0..=3));
    let kinds = random_kinds(ell, &mut rng);
    let cs = random_constraints(d, &kinds, Some(&rho), &mut rng).expect("anchored set");
    let report = match face_report(&rho, &cs) {
        Ok(r) => r,
        Err(e) => {
            return Some(violation(
                Suite::DimDrop,
                seed,
                stream,
                format!("face_report failed: {e}"),
                Some(problem_value(&rho, &cs)),
            ))
        }
    };
    let drop = report.ambient_dim - report.constrained_dim;
    if drop > report.active.len() || report.active.len() > cs.len() {
        return Some(violation(
            Suite::DimDrop,
            seed,
            stream,
            format!(
                "drop {} exceeds active count {} (ell = {})",
                drop,
                report.active.len(),
                cs.len()
            ),
            Some(problem_value(&rho, &cs)),
        ));
    }
    if ell == 1 && drop > 1 {
        return Some(violation(
            Suite::DimDrop,
            seed,
            stream,
            format!("single constraint dropped dimension by {}", drop),
            Some(problem_value(&rho, &cs)),
        ));
    }
    // Gap law: the state set has no faces of dimension 1 or 2, so with ell
    // constraints no constrained face has dimension in {1, ..., 2 - ell}.
    let m = report.constrained_dim;
    let gap_violated = match cs.len() {
        0 => m == 1 || m == 2,
        1 => m == 1,
        _ => false,
    };
    if gap_violated {
        return Some(violation(
            Suite::DimDrop,
            seed,
            stream,
            format!("constrained face dimension {} lies in the forbidden gap", m),
            Some(problem_value(&rho, &cs)),
        ));
    }
    None
}

fn decompose_instance(seed: u64, stream: u64) -> Option<Violation> {
    let mut rng = rng_for(seed, stream);
    let d = stream_dim(stream);
    let rank = rng.gen_range(1..=d);
    let rho = random_state(d, rank, &mut rng).expect("valid rank");
    let cs = random_constraints(
        d,
        &[ConstraintKind::Level, ConstraintKind::Level],
        Some(&rho),
        &mut rng,
    )
    .expect("anchored set");
    let problem = || Some(problem_value(&rho, &cs));
    let dec = match pure_decompose(&rho, &cs) {
        Ok(dec) => dec,
        Err(e) => {
            return Some(violation(
                Suite::Decompose,
                seed,
                stream,
                format!("decomposition failed: {e}"),
                problem(),
            ))
        }
    };
    if dec.residual > 1e-9 {
        return Some(violation(
            Suite::Decompose,
            seed,
            stream,
            format!("reconstruction residual {:.3e}", dec.residual),
            problem(),
        ));
    }
    if dec.len() > d * d {
        return Some(violation(
            Suite::Decompose,
            seed,
            stream,
            format!("{} components exceeds d^2 = {}", dec.len(), d * d),
            problem(),
        ));
    }
    let total: f64 = dec.components.iter().map(|c| c.weight).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Some(violation(
            Suite::Decompose,
            seed,
            stream,
            format!("weights sum to {}", total),
            problem(),
        ));
    }
    for comp in &dec.components {
        for (k, c) in cs.iter().enumerate() {
            let err = (comp.values[k] - c.bound).abs();
            if err > 1e-8 * c.bound.abs().max(1.0) {
                return Some(violation(
                    Suite::Decompose,
                    seed,
                    stream,
                    format!("component misses level value {} by {:.3e}", c.bound, err),
                    problem(),
                ));
            }
        }
    }
    None
}

fn enorm_instance(seed: u64, stream: u64) -> Option<Violation> {
    let mut rng = rng_for(seed, stream);
    let d = stream_dim(stream);
    let a = random_operator(d, &mut rng);
    let h = random_observable(d, &mut rng);
    let anchor = random_state(d, rng.gen_range(1..=d), &mut rng).expect("valid rank");
    let e = expected_value(&anchor, &h).expect("same dim");
    let repro = || {
        Some(json!({
            "dim": d,
            "operator": ComplexMatrix(a.clone()),
            "observable": ComplexMatrix(h.matrix().clone()),
            "e": e,
        }))
    };
    let dual = match enorm_dual(&a, &h, e) {
        Ok(v) => v,
        Err(e) => {
            return Some(violation(
                Suite::Enorm,
                seed,
                stream,
                format!("dual route failed: {e}"),
                repro(),
            ))
        }
    };
    let pure = match enorm_pure(&a, &h, e, 32, seed ^ stream) {
        Ok(r) => r,
        Err(e) => {
            return Some(violation(
                Suite::Enorm,
                seed,
                stream,
                format!("sphere route failed: {e}"),
                repro(),
            ))
        }
    };
    if (dual - pure.value).abs() > 1e-6 {
        return Some(violation(
            Suite::Enorm,
            seed,
            stream,
            format!("routes disagree: dual {} pure {}", dual, pure.value),
            repro(),
        ));
    }
    // Spot-check the saturation and concavity laws on a subset.
    if stream & 0x3f == 0 {
        let h_eig = EigH::new(h.matrix());
        let sigma_max = EigH::new(&(a.adjoint() * &a)).lambda_max().max(0.0).sqrt();
        let beyond = match enorm_dual(&a, &h, h_eig.lambda_max() + 1.0) {
            Ok(v) => v,
            Err(e) => {
                return Some(violation(
                    Suite::Enorm,
                    seed,
                    stream,
                    format!("saturation evaluation failed: {e}"),
                    repro(),
                ))
            }
        };
        if (beyond - sigma_max).abs() > 1e-8 {
            return Some(violation(
                Suite::Enorm,
                seed,
                stream,
                format!(
                    "enorm at large E is {} but the operator norm is {}",
                    beyond, sigma_max
                ),
                repro(),
            ));
        }
        let (lo, hi) = (h_eig.lambda_min(), h_eig.lambda_max());
        let values: Result<Vec<f64>, Error> = (0..=12)
            .map(|k| enorm_dual(&a, &h, lo + (hi - lo) * k as f64 / 12.0))
            .collect();
        match values {
            Ok(values) => {
                for w in values.windows(3) {
                    if w[1] < 0.5 * (w[0] + w[2]) - 1e-7 {
                        return Some(violation(
                            Suite::Enorm,
                            seed,
                            stream,
                            format!("midpoint concavity violated: {:?}", w),
                            repro(),
                        ));
                    }
                }
                for w in values.windows(2) {
                    if w[1] < w[0] - 1e-9 {
                        return Some(violation(
                            Suite::Enorm,
                            seed,
                            stream,
                            format!("value function not monotone: {:?}", w),
                            repro(),
                        ));
                    }
                }
            }
            Err(e) => {
                return Some(violation(
                    Suite::Enorm,
                    seed,
                    stream,
                    format!("sweep evaluation failed: {e}"),
                    repro(),
                ))
            }
        }
    }
    None
}

fn jensen_instance(seed: u64, stream: u64) -> Option<Violation> {
    let mut rng = rng_for(seed, stream);
    let d = stream_dim(stream);
    let rank = rng.gen_range(1..=d);
    let rho = random_state(d, rank, &mut rng).expect("valid rank");
    let ell = rng.gen_range(1..=2);
    let kinds = vec![ConstraintKind::Level; ell];
    let cs = random_constraints(d, &kinds, Some(&rho), &mut rng).expect("anchored set");
    let problem = || Some(problem_value(&rho, &cs));
    let dec = match pure_decompose(&rho, &cs) {
        Ok(dec) => dec,
        Err(e) => {
            return Some(violation(
                Suite::Jensen,
                seed,
                stream,
                format!("decomposition failed: {e}"),
                problem(),
            ))
        }
    };
    // Convex f satisfies f(rho) <= max_i f(sigma_i); test lambda_max and
    // negative entropy.
    let lambda_max_mix = rho.eigenvalues()[0];
    let lambda_max_comp = dec
        .components
        .iter()
        .map(|c| DensityOperator::from_pure(&c.state).eigenvalues()[0])
        .fold(f64::NEG_INFINITY, f64::max);
    if lambda_max_mix > lambda_max_comp + 1e-9 {
        return Some(violation(
            Suite::Jensen,
            seed,
            stream,
            format!(
                "lambda_max Jensen violated: {} > {}",
                lambda_max_mix, lambda_max_comp
            ),
            problem(),
        ));
    }
    let neg_entropy_mix = -von_neumann_entropy(&rho);
    let neg_entropy_comp = dec
        .components
        .iter()
        .map(|c| -von_neumann_entropy(&DensityOperator::from_pure(&c.state)))
        .fold(f64::NEG_INFINITY, f64::max);
    if neg_entropy_mix > neg_entropy_comp + 1e-9 {
        return Some(violation(
            Suite::Jensen,
            seed,
            stream,
            format!(
                "negative-entropy Jensen violated: {} > {}",
                neg_entropy_mix, neg_entropy_comp
            ),
            problem(),
        ));
    }
    None
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn paulis() -> [CMat; 3] {
    [
        CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    ]
}

fn three_pauli_set(kind: ConstraintKind) -> ConstraintSet {
    ConstraintSet::new(
        paulis()
            .into_iter()
            .map(|p| {
                Constraint::new(
                    HermitianObservable::new(identity(2) + p, None).expect("Hermitian"),
                    1.0,
                    kind,
                )
                .expect("finite bound")
            })
            .collect(),
    )
    .expect("same dimension")
}

/// The fixed counterexample checks: the three-observable extreme point of
/// rank two, its decomposition failure, the pure-state image interval, and
/// the classical-triangle certificate.
pub fn counterexample_checks(seed: u64) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut fail = |message: String| {
        violations.push(Violation {
            stream: 0,
            message,
            reproducer: json!({"suite": "counterexamples", "seed": seed}),
        });
    };

    let trace_state = DensityOperator::maximally_mixed(2);
    let level_set = three_pauli_set(ConstraintKind::Level);
    match face_report(&trace_state, &level_set) {
        Ok(report) => {
            if !report.extreme || report.rank != 2 {
                fail(format!(
                    "trace state under three Pauli levels: extreme = {}, rank = {}",
                    report.extreme, report.rank
                ));
            }
        }
        Err(e) => fail(format!("three-observable face report failed: {e}")),
    }
    match pure_decompose(&trace_state, &level_set) {
        Err(Error::ExtremeMixedState { rank: 2 }) => {}
        Err(e) => fail(format!("expected ExtremeMixedState, got {e}")),
        Ok(_) => fail("decomposition of the three-observable extreme point succeeded".into()),
    }

    // Pure states in the all-sublevel set have (x, y, z) Bloch coordinates
    // in the non-positive octant; f = x + y + z spans [-sqrt(3), -1].
    let [px, py, pz] = paulis();
    let f_obs = &px + &py + &pz;
    let n_theta = 700usize;
    let n_phi = 700usize;
    let mut f_min = f64::INFINITY;
    let mut f_max = f64::NEG_INFINITY;
    let mut sampled = 0usize;
    for i in 0..=n_theta {
        let theta = std::f64::consts::PI * i as f64 / n_theta as f64;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let v = CVec::from_vec(vec![
                c((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ]);
            let x = (v.adjoint() * &px * &v)[(0, 0)].re;
            let y = (v.adjoint() * &py * &v)[(0, 0)].re;
            let z = (v.adjoint() * &pz * &v)[(0, 0)].re;
            if x <= 0.0 && y <= 0.0 && z <= 0.0 {
                let f = x + y + z;
                f_min = f_min.min(f);
                f_max = f_max.max(f);
                sampled += 1;
            }
        }
    }
    let sqrt3 = 3f64.sqrt();
    if sampled == 0 {
        fail("no pure states sampled in the sublevel set".into());
    }
    if f_min < -sqrt3 - 1e-6 || f_max > -1.0 + 1e-3 {
        fail(format!(
            "pure-state image [{:.6}, {:.6}] leaves [-sqrt3, -1]",
            f_min, f_max
        ));
    }
    if f_min > -sqrt3 + 1e-3 || f_max < -1.0 - 1e-3 {
        fail(format!(
            "pure-state image [{:.6}, {:.6}] does not approach the endpoints",
            f_min, f_max
        ));
    }
    let f_mixed = expected_value(
        &trace_state,
        &HermitianObservable::new(f_obs, None).expect("Hermitian"),
    )
    .expect("same dim");
    if f_mixed.abs() > 1e-12 {
        fail(format!("f at the trace state is {}, not 0", f_mixed));
    }

    let triangle = triangle_counterexample();
    if !triangle.certificate_ok {
        fail(format!("triangle certificate failed: {:?}", triangle));
    }
    violations
}

/// Runs a suite at the configured sample counts with deterministic
/// per-instance streams; the fan-out schedule never changes the report.
pub fn verify_suite(suite: Suite, config: &RunConfig) -> VerificationReport {
    let start = Instant::now();
    let streams: Vec<u64> = match suite {
        Suite::Purity | Suite::DimDrop => config
            .dims
            .iter()
            .flat_map(|&d| (0..config.samples as u64).map(move |k| stream_id(d, k)))
            .collect(),
        Suite::Decompose | Suite::Jensen => (0..config.samples as u64)
            .map(|k| {
                let d = 2 + (k % 5) as usize;
                stream_id(d.min(6), k)
            })
            .collect(),
        Suite::Enorm => (0..config.samples as u64)
            .map(|k| stream_id(2 + (k % 5) as usize, k))
            .collect(),
        Suite::Counterexamples => vec![0],
    };
    let streams: Vec<u64> = match config.instance {
        Some(wanted) => streams.into_iter().filter(|&s| s == wanted).collect(),
        None => streams,
    };
    let seed = config.seed;
    let ell = config.ell;
    let instances = streams.len();
    let violations: Vec<Violation> = if suite == Suite::Counterexamples {
        counterexample_checks(seed)
    } else {
        thread_pool().install(|| {
            streams
                .par_iter()
                .filter_map(|&stream| match suite {
                    Suite::Purity => purity_instance(seed, stream),
                    Suite::DimDrop => dim_drop_instance(seed, stream, ell),
                    Suite::Decompose => decompose_instance(seed, stream),
                    Suite::Enorm => enorm_instance(seed, stream),
                    Suite::Jensen => jensen_instance(seed, stream),
                    Suite::Counterexamples => unreachable!(),
                })
                .collect()
        })
    };
    let mut violations = violations;
    violations.sort_by_key(|v| v.stream);
    VerificationReport::new(suite.name(), instances, violations, start.elapsed().as_millis())
}
