//! Acceptance gate: every release criterion runs here at its stated sample
//! count and tolerance, printing one PASS line per criterion (visible with
//! `cargo test -p facecut --test acceptance -- --nocapture`).

use std::time::Instant;

use facecut::config::RunConfig;
use facecut::suites::{counterexample_checks, verify_suite, Suite};
use facecut_core::classical::{
    hadamard_transform, poly_face_membership, poly_segment_witness, ratio_limit_report,
    triangle_counterexample, Polynomial, SymbolicDensity, Trend,
};
use facecut_core::constraint::{ConstraintKind, HermitianObservable};
use facecut_core::decompose::{bipartite_decompose, partial_trace, Subsystem};
use facecut_core::face::{default_lambda_grid, face_membership, segment_oracle};
use facecut_core::matrix::{max_abs, CMat, CVec, C_ZERO};
use facecut_core::optimize::{
    apply_channel, min_output_entropy, von_neumann_entropy, KrausChannel,
};
use facecut_core::random::{random_channel, random_observable, random_state};
use facecut_core::state::{DensityOperator, PureState};
use num::rational::BigRational;
use num::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn rng_for(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report_violations(report: &facecut::VerificationReport) -> String {
    report
        .violations
        .iter()
        .take(3)
        .map(|v| format!("stream {}: {}", v.stream, v.message))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_1_purity_of_extreme_points() {
    let start = Instant::now();
    let config = RunConfig {
        seed: 20200604,
        samples: 10_000,
        dims: vec![2, 3, 4],
        ..RunConfig::default()
    };
    let report = verify_suite(Suite::Purity, &config);
    assert_eq!(report.instances, 30_000);
    assert!(report.pass, "violations:\n{}", report_violations(&report));
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() <= 120.0,
        "purity suite took {:.1}s (budget 120s)",
        elapsed.as_secs_f64()
    );
    println!(
        "ACCEPTANCE 1 purity-of-extreme-points: PASS ({} instances in {:.1}s)",
        report.instances,
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_2_dimension_drop_window() {
    let config = RunConfig {
        seed: 77,
        samples: 4_000,
        dims: vec![2, 3, 4],
        ..RunConfig::default()
    };
    let report = verify_suite(Suite::DimDrop, &config);
    assert_eq!(report.instances, 12_000);
    assert!(report.pass, "violations:\n{}", report_violations(&report));

    // Single-constraint run: the drop is never more than one.
    let config_ell1 = RunConfig {
        seed: 78,
        samples: 4_000,
        dims: vec![2, 3, 4],
        ell: Some(1),
        ..RunConfig::default()
    };
    let report_ell1 = verify_suite(Suite::DimDrop, &config_ell1);
    assert!(
        report_ell1.pass,
        "violations:\n{}",
        report_violations(&report_ell1)
    );
    println!(
        "ACCEPTANCE 2 dimension-drop-window: PASS ({} + {} instances)",
        report.instances, report_ell1.instances
    );
}

#[test]
fn criterion_3_pure_state_decomposition() {
    let start = Instant::now();
    let config = RunConfig {
        seed: 3,
        samples: 1_000,
        ..RunConfig::default()
    };
    let report = verify_suite(Suite::Decompose, &config);
    assert_eq!(report.instances, 1_000);
    assert!(report.pass, "violations:\n{}", report_violations(&report));
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() <= 60.0,
        "decompose suite took {:.1}s (budget 60s)",
        elapsed.as_secs_f64()
    );
    println!(
        "ACCEPTANCE 3 pure-state-decomposition: PASS ({} instances in {:.1}s)",
        report.instances,
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_4_bipartite_decomposition() {
    for i in 0..100u64 {
        let mut rng = rng_for(0xB1, i);
        let rho = random_state(4, rng.gen_range(1..=4), &mut rng).unwrap();
        let h_a = random_observable(2, &mut rng);
        let h_b = random_observable(2, &mut rng);
        let dec = bipartite_decompose(&rho, 2, 2, &h_a, &h_b).unwrap();
        assert!(
            dec.decomposition.len() <= 16,
            "instance {i}: {} components",
            dec.decomposition.len()
        );
        for m in &dec.marginals {
            assert!(
                (m.value_a - dec.e_a).abs() <= 1e-8 * dec.e_a.abs().max(1.0),
                "instance {i}: marginal A misses by {:.3e}",
                (m.value_a - dec.e_a).abs()
            );
            assert!(
                (m.value_b - dec.e_b).abs() <= 1e-8 * dec.e_b.abs().max(1.0),
                "instance {i}: marginal B misses by {:.3e}",
                (m.value_b - dec.e_b).abs()
            );
        }
    }
    println!("ACCEPTANCE 4 bipartite-decomposition: PASS (100 two-qubit instances)");
}

#[test]
fn criterion_5_three_constraint_counterexample() {
    let violations = counterexample_checks(5);
    assert!(
        violations.is_empty(),
        "counterexample checks failed:\n{}",
        violations
            .iter()
            .map(|v| v.message.clone())
            .collect::<Vec<_>>()
            .join("\n")
    );
    println!("ACCEPTANCE 5 three-constraint-counterexample: PASS");
}

#[test]
fn criterion_6_enorm_coincidence() {
    let start = Instant::now();
    let config = RunConfig {
        seed: 6,
        samples: 1_000,
        ..RunConfig::default()
    };
    let report = verify_suite(Suite::Enorm, &config);
    assert_eq!(report.instances, 1_000);
    assert!(report.pass, "violations:\n{}", report_violations(&report));
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() <= 180.0,
        "enorm suite took {:.1}s (budget 180s)",
        elapsed.as_secs_f64()
    );
    println!(
        "ACCEPTANCE 6 enorm-coincidence: PASS ({} instances in {:.1}s)",
        report.instances,
        elapsed.as_secs_f64()
    );
}

/// Minimal output entropy over the feasible Bloch grid.
fn qubit_grid_min_entropy(
    phi: &KrausChannel,
    h: &HermitianObservable,
    e: f64,
    n_theta: usize,
    n_phi: usize,
) -> f64 {
    let hm = h.matrix();
    let mut best = f64::INFINITY;
    for i in 0..=n_theta {
        let theta = std::f64::consts::PI * i as f64 / n_theta as f64;
        for j in 0..n_phi {
            let ang = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let v = CVec::from_vec(vec![
                c((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), ang),
            ]);
            if (v.adjoint() * hm * &v)[(0, 0)].re > e + 1e-12 {
                continue;
            }
            let rho = DensityOperator::from_pure(&PureState::new(v).unwrap());
            let s = von_neumann_entropy(&apply_channel(phi, &rho).unwrap());
            best = best.min(s);
        }
    }
    best
}

#[test]
fn criterion_7_constrained_min_output_entropy() {
    let h = HermitianObservable::new(
        CMat::from_diagonal(&CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)])),
        None,
    )
    .unwrap();

    // Identity channel: exact zero.
    let id = KrausChannel::identity(2);
    let r = min_output_entropy(&id, &h, 0.4, ConstraintKind::Sublevel, 8, 7).unwrap();
    assert_eq!(r.value, 0.0, "identity channel entropy {}", r.value);

    // Completely depolarizing: ln 2 regardless of the constraint.
    let depol = KrausChannel::depolarizing_qubit();
    let r = min_output_entropy(&depol, &h, 0.4, ConstraintKind::Sublevel, 8, 7).unwrap();
    assert!((r.value - 2f64.ln()).abs() <= 1e-9);

    // Amplitude damping at the pinned instance vs the 1e5-point grid.
    let damp = KrausChannel::amplitude_damping(0.5).unwrap();
    let grid = qubit_grid_min_entropy(&damp, &h, 0.3, 316, 316);
    let r = min_output_entropy(&damp, &h, 0.3, ConstraintKind::Sublevel, 16, 9).unwrap();
    assert!(
        r.value <= grid + 1e-4,
        "amplitude damping: optimizer {} grid {}",
        r.value,
        grid
    );

    // Random qubit channels with a binding variant of the constraint.
    let h_flip = HermitianObservable::new(
        CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])),
        None,
    )
    .unwrap();
    for i in 0..5u64 {
        let mut rng = rng_for(0x77, i);
        let phi = random_channel(2, 2, &mut rng);
        for (h_k, e) in [(&h, 0.3f64), (&h_flip, 0.3f64)] {
            let grid = qubit_grid_min_entropy(&phi, h_k, e, 316, 316);
            let r = min_output_entropy(&phi, h_k, e, ConstraintKind::Sublevel, 24, 100 + i)
                .unwrap();
            assert!(
                r.value <= grid + 1e-4,
                "random channel {i}: optimizer {} grid {}",
                r.value,
                grid
            );
        }
    }
    println!("ACCEPTANCE 7 constrained-min-output-entropy: PASS");
}

#[test]
fn criterion_8_classical_suites() {
    // Triangle certificate, deterministically.
    let first = serde_json::to_string(&triangle_counterexample()).unwrap();
    let second = serde_json::to_string(&triangle_counterexample()).unwrap();
    assert_eq!(first, second);
    assert!(triangle_counterexample().certificate_ok);

    // Polynomial membership equals degree comparison on 1e4 random pairs.
    let mut rng = rng_for(0x901, 0);
    let random_poly = |rng: &mut ChaCha12Rng| -> Polynomial {
        let degree = rng.gen_range(0..=8usize);
        let mut coeffs: Vec<BigRational> = (0..=degree)
            .map(|_| {
                BigRational::new(
                    BigInt::from(rng.gen_range(-9i64..=9)),
                    BigInt::from(rng.gen_range(1i64..=9)),
                )
            })
            .collect();
        let lead = rng.gen_range(1i64..=9);
        coeffs[degree] = BigRational::new(BigInt::from(lead), BigInt::from(rng.gen_range(1i64..=9)));
        Polynomial::new(coeffs)
    };
    for i in 0..10_000 {
        let p = random_poly(&mut rng);
        let q = random_poly(&mut rng);
        let member = poly_face_membership(&q, &p).unwrap();
        assert_eq!(member, q.degree() <= p.degree(), "pair {i}");
        let witness = poly_segment_witness(&q, &p).unwrap();
        assert_eq!(witness.is_some(), member, "witness mismatch at pair {i}");
        if let Some((lambda, combo)) = witness {
            assert!(lambda < BigRational::new(BigInt::from(0), BigInt::from(1)));
            assert_eq!(combo.degree(), p.degree());
        }
    }

    // Hadamard chain signatures for Geometric(1/2), k <= 2, N = 1e3.
    let mut chain = vec![SymbolicDensity::geometric(0.5).unwrap()];
    for _ in 0..2 {
        chain.push(hadamard_transform(chain.last().unwrap()).unwrap());
    }
    for k in 0..2 {
        let fwd = ratio_limit_report(&chain[k], &chain[k + 1], 1000);
        assert_eq!(fwd.trend, Trend::Bounded, "forward link {k}");
        let rev = ratio_limit_report(&chain[k + 1], &chain[k], 1000);
        assert_eq!(rev.trend, Trend::Diverging, "reverse link {k}");
    }

    // Zeta ordering signature over (s, t) in {2,3,4}^2.
    for s in [2.0f64, 3.0, 4.0] {
        for t in [2.0f64, 3.0, 4.0] {
            let ps = SymbolicDensity::zeta(s).unwrap();
            let pt = SymbolicDensity::zeta(t).unwrap();
            let report = ratio_limit_report(&ps, &pt, 10_000);
            let expected = if t <= s { Trend::Bounded } else { Trend::Diverging };
            assert_eq!(report.trend, expected, "zeta pair s={s} t={t}: {report:?}");
        }
    }
    println!("ACCEPTANCE 8 classical-suites: PASS");
}

#[test]
fn criterion_9_oracle_equivalences() {
    // face_membership vs the segment oracle on 1e3 structured pairs at d=3.
    let grid = default_lambda_grid();
    for i in 0..1000u64 {
        let mut rng = rng_for(0x09AC, i);
        let d = 3;
        let rank_rho = rng.gen_range(1..=d);
        let rho = random_state(d, rank_rho, &mut rng).unwrap();
        let inside = rng.gen_bool(0.5) || rank_rho == d;
        let sigma = if inside {
            let sub_rank = rng.gen_range(1..=rank_rho);
            let inner = random_state(rank_rho, sub_rank, &mut rng).unwrap();
            let basis = rho.support().basis;
            DensityOperator::new(&basis * inner.matrix() * basis.adjoint()).unwrap()
        } else {
            let eig = rho.eig();
            let kernel_vec = eig.vectors.column(d - 1).into_owned();
            DensityOperator::new(
                rho.matrix().scale(0.5) + (&kernel_vec * kernel_vec.adjoint()).scale(0.5),
            )
            .unwrap()
        };
        let member = face_membership(&sigma, &rho).unwrap();
        let oracle = segment_oracle(&sigma, &rho, &grid).unwrap();
        assert_eq!(member, oracle, "pair {i}");
    }

    // partial_trace against explicit 4-index loops.
    for i in 0..50u64 {
        let mut rng = rng_for(0x97AC, i);
        let (d_a, d_b) = (2usize, 3usize);
        let rho = random_state(d_a * d_b, rng.gen_range(1..=6), &mut rng).unwrap();
        let fast = partial_trace(rho.matrix(), d_a, d_b, Subsystem::B).unwrap();
        let mut slow = CMat::from_element(d_a, d_a, C_ZERO);
        for a in 0..d_a {
            for a2 in 0..d_a {
                for b in 0..d_b {
                    slow[(a, a2)] += rho.matrix()[(a * d_b + b, a2 * d_b + b)];
                }
            }
        }
        assert!(max_abs(&(fast - slow)) <= 1e-13);
    }

    // apply_channel against explicit triple loops.
    for i in 0..50u64 {
        let mut rng = rng_for(0xC4A1, i);
        let d = 3;
        let phi = random_channel(d, 2, &mut rng);
        let rho = random_state(d, d, &mut rng).unwrap();
        let fast = apply_channel(&phi, &rho).unwrap();
        let mut slow = CMat::from_element(d, d, C_ZERO);
        for k in phi.kraus() {
            for i1 in 0..d {
                for j1 in 0..d {
                    for p in 0..d {
                        for q in 0..d {
                            slow[(i1, j1)] +=
                                k[(i1, p)] * rho.matrix()[(p, q)] * k[(j1, q)].conj();
                        }
                    }
                }
            }
        }
        assert!(max_abs(&(fast.matrix() - slow)) <= 1e-13);
    }
    println!("ACCEPTANCE 9 oracle-equivalences: PASS");
}
