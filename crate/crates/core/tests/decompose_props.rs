//! Randomized decomposition properties: reconstruction, exact constraint
//! preservation, component bounds, Jensen's inequality on the output
//! ensemble, and independent loop oracles for the tensor contractions.

use facecut_core::constraint::{expected_value, ConstraintKind};
use facecut_core::decompose::{
    bipartite_decompose, caratheodory_reduce, partial_trace, pure_decompose, split_once, Subsystem,
};
use facecut_core::matrix::{kron, max_abs, CMat, C_ZERO};
use facecut_core::optimize::{apply_channel, von_neumann_entropy, KrausChannel};
use facecut_core::random::{
    random_channel, random_constraints, random_observable, random_pure, random_state,
};
use facecut_core::state::DensityOperator;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn rng_for(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[test]
fn expected_value_matches_eigenpair_sum() {
    use facecut_core::random::haar_unitary;
    for i in 0..200 {
        let mut rng = rng_for(0xE16, i);
        let d = rng.gen_range(2..=5);
        // Synthesize the state from explicit eigen-data so the oracle does
        // not depend on any eigensolver.
        let mut spectrum: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..1.0f64)).collect();
        let total: f64 = spectrum.iter().sum();
        for s in &mut spectrum {
            *s /= total;
        }
        let u = haar_unitary(d, &mut rng);
        let rho = DensityOperator::from_eigensystem(&spectrum, &u).unwrap();
        let h = random_observable(d, &mut rng);
        let direct = expected_value(&rho, &h).unwrap();
        // Independent oracle: sum over eigenpairs of lambda_i <v_i|H|v_i>.
        let oracle: f64 = (0..d)
            .map(|k| {
                let v = u.column(k);
                spectrum[k] * (v.adjoint() * h.matrix() * v)[(0, 0)].re
            })
            .sum();
        assert!((direct - oracle).abs() <= 1e-12 * direct.abs().max(1.0));
    }
}

#[test]
fn decomposition_reconstructs_with_exact_level_values() {
    for i in 0..300 {
        let mut rng = rng_for(0xDEC0, i);
        let d = rng.gen_range(2..=6);
        let rank = rng.gen_range(1..=d);
        let rho = random_state(d, rank, &mut rng).unwrap();
        let cs = random_constraints(
            d,
            &[ConstraintKind::Level, ConstraintKind::Level],
            Some(&rho),
            &mut rng,
        )
        .unwrap();
        let dec = pure_decompose(&rho, &cs).unwrap();
        assert!(dec.residual <= 1e-9, "residual {} at i={i}", dec.residual);
        assert!(dec.len() <= d * d, "{} components at d={d}", dec.len());
        assert!(
            dec.reduced_from <= 1 << (rank.max(1) - 1),
            "{} leaves from rank {rank}",
            dec.reduced_from
        );
        let weight: f64 = dec.components.iter().map(|c| c.weight).sum();
        assert!((weight - 1.0).abs() <= 1e-12);
        for comp in &dec.components {
            for (k, c) in cs.iter().enumerate() {
                let err = (comp.values[k] - c.bound).abs();
                assert!(
                    err <= 1e-8 * c.bound.abs().max(1.0),
                    "component misses level value by {err:.3e}"
                );
            }
        }
    }
}

#[test]
fn decomposition_with_mixed_kinds_keeps_components_feasible() {
    // Sublevel constraints are value-preserving during splitting, so every
    // component inherits the parent's value and in particular stays
    // feasible.
    for i in 0..150 {
        let mut rng = rng_for(0x50B1, i);
        let d = rng.gen_range(2..=4);
        let rho = random_state(d, rng.gen_range(1..=d), &mut rng).unwrap();
        let kinds = [ConstraintKind::Sublevel, ConstraintKind::Level];
        let cs = random_constraints(d, &kinds, Some(&rho), &mut rng).unwrap();
        let parent_values: Vec<f64> = cs
            .iter()
            .map(|c| expected_value(&rho, &c.observable).unwrap())
            .collect();
        let dec = pure_decompose(&rho, &cs).unwrap();
        assert!(dec.residual <= 1e-9);
        for comp in &dec.components {
            for (k, c) in cs.iter().enumerate() {
                let drift = (comp.values[k] - parent_values[k]).abs();
                assert!(
                    drift <= 1e-8 * parent_values[k].abs().max(1.0),
                    "component value drifts by {drift:.3e}"
                );
                if c.kind == ConstraintKind::Sublevel {
                    assert!(comp.values[k] <= c.bound + 1e-8 * c.bound.abs().max(1.0));
                }
            }
        }
    }
}

#[test]
fn split_preserves_all_constraint_values() {
    for i in 0..300 {
        let mut rng = rng_for(0x5711, i);
        let d = rng.gen_range(2..=5);
        let rank = rng.gen_range(2..=d);
        let rho = random_state(d, rank, &mut rng).unwrap();
        let ell = rng.gen_range(0..=2);
        let kinds: Vec<ConstraintKind> = (0..ell)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    ConstraintKind::Level
                } else {
                    ConstraintKind::Sublevel
                }
            })
            .collect();
        let cs = random_constraints(d, &kinds, Some(&rho), &mut rng).unwrap();
        let ((p, plus), (q, minus)) = split_once(&rho, &cs).unwrap();
        assert!(plus.numerical_rank() < rank);
        assert!(minus.numerical_rank() < rank);
        let rebuilt = plus.matrix().scale(p) + minus.matrix().scale(q);
        assert!(max_abs(&(rebuilt - rho.matrix())) <= 1e-12);
        for c in cs.iter() {
            let parent = expected_value(&rho, &c.observable).unwrap();
            for child in [&plus, &minus] {
                let value = expected_value(child, &c.observable).unwrap();
                assert!(
                    (value - parent).abs() <= 1e-10 * parent.abs().max(1.0),
                    "child drifts constraint value by {:.3e}",
                    (value - parent).abs()
                );
            }
        }
    }
}

#[test]
fn caratheodory_reduces_d3_overcomplete_ensembles() {
    for i in 0..50 {
        let mut rng = rng_for(0xCA7A, i);
        let d = 3;
        let mut comps = Vec::new();
        let mut weights = Vec::new();
        for _ in 0..12 {
            weights.push(rng.gen_range(0.01..1.0f64));
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        for &w in &weights {
            comps.push((w, random_pure(d, &mut rng)));
        }
        let before: CMat = comps
            .iter()
            .fold(CMat::from_element(d, d, C_ZERO), |acc, (w, phi)| {
                acc + phi.projector().scale(*w)
            });
        let reduced = caratheodory_reduce(comps).unwrap();
        assert!(reduced.len() <= d * d, "kept {} components", reduced.len());
        let after: CMat = reduced
            .iter()
            .fold(CMat::from_element(d, d, C_ZERO), |acc, (w, phi)| {
                acc + phi.projector().scale(*w)
            });
        assert!(max_abs(&(after - before)) <= 1e-9);
    }
}

#[test]
fn jensen_inequality_on_components() {
    // f convex: lambda_max and negative entropy; f(rho) <= max_i f(sigma_i).
    for i in 0..100 {
        let mut rng = rng_for(0x1E45, i);
        let d = rng.gen_range(2..=4);
        let rho = random_state(d, rng.gen_range(1..=d), &mut rng).unwrap();
        let cs = random_constraints(d, &[ConstraintKind::Level], Some(&rho), &mut rng).unwrap();
        let dec = pure_decompose(&rho, &cs).unwrap();
        let lambda_max_rho = rho.eigenvalues()[0];
        let max_lambda_comp = dec
            .components
            .iter()
            .map(|c| {
                DensityOperator::from_pure(&c.state).eigenvalues()[0]
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(lambda_max_rho <= max_lambda_comp + 1e-9);
        let neg_entropy_rho = -von_neumann_entropy(&rho);
        let max_neg_entropy = dec
            .components
            .iter()
            .map(|c| -von_neumann_entropy(&DensityOperator::from_pure(&c.state)))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(neg_entropy_rho <= max_neg_entropy + 1e-9);
    }
}

#[test]
fn partial_trace_matches_loop_oracle() {
    for i in 0..100 {
        let mut rng = rng_for(0x97AC, i);
        let (d_a, d_b) = (2usize, rng.gen_range(2..=3));
        let d = d_a * d_b;
        let rho = random_state(d, rng.gen_range(1..=d), &mut rng).unwrap();
        let fast_a = partial_trace(rho.matrix(), d_a, d_b, Subsystem::B).unwrap();
        let fast_b = partial_trace(rho.matrix(), d_a, d_b, Subsystem::A).unwrap();
        // Naive 4-index loops.
        let mut slow_a = CMat::from_element(d_a, d_a, C_ZERO);
        let mut slow_b = CMat::from_element(d_b, d_b, C_ZERO);
        for a in 0..d_a {
            for a2 in 0..d_a {
                for b in 0..d_b {
                    for b2 in 0..d_b {
                        let entry = rho.matrix()[(a * d_b + b, a2 * d_b + b2)];
                        if b == b2 {
                            slow_a[(a, a2)] += entry;
                        }
                        if a == a2 {
                            slow_b[(b, b2)] += entry;
                        }
                    }
                }
            }
        }
        assert!(max_abs(&(fast_a - slow_a)) <= 1e-14);
        assert!(max_abs(&(fast_b - slow_b)) <= 1e-14);
    }
}

#[test]
fn apply_channel_matches_loop_oracle() {
    for i in 0..50 {
        let mut rng = rng_for(0xC4A1, i);
        let d = rng.gen_range(2..=3);
        let phi = random_channel(d, rng.gen_range(1..=3), &mut rng);
        let rho = random_state(d, d, &mut rng).unwrap();
        let fast = apply_channel(&phi, &rho).unwrap();
        let mut slow = CMat::from_element(d, d, C_ZERO);
        for k in phi.kraus() {
            for i1 in 0..d {
                for j1 in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for p in 0..d {
                        for q in 0..d {
                            acc += k[(i1, p)] * rho.matrix()[(p, q)] * k[(j1, q)].conj();
                        }
                    }
                    slow[(i1, j1)] += acc;
                }
            }
        }
        assert!(max_abs(&(fast.matrix() - slow)) <= 1e-13);
    }
}

#[test]
fn bipartite_marginals_match_input() {
    for i in 0..30 {
        let mut rng = rng_for(0xB17A, i);
        let rho = random_state(4, rng.gen_range(1..=4), &mut rng).unwrap();
        let h_a = random_observable(2, &mut rng);
        let h_b = random_observable(2, &mut rng);
        let dec = bipartite_decompose(&rho, 2, 2, &h_a, &h_b).unwrap();
        assert!(dec.decomposition.len() <= 16);
        assert!(dec.decomposition.residual <= 1e-9);
        for m in &dec.marginals {
            assert!((m.value_a - dec.e_a).abs() <= 1e-8 * dec.e_a.abs().max(1.0));
            assert!((m.value_b - dec.e_b).abs() <= 1e-8 * dec.e_b.abs().max(1.0));
        }
    }
}

#[test]
fn identity_channel_is_kron_compatible() {
    // partial_trace and kron respect the composite index convention.
    let mut rng = rng_for(0x1D, 0);
    let rho_a = random_state(2, 2, &mut rng).unwrap();
    let rho_b = random_state(3, 3, &mut rng).unwrap();
    let prod = kron(rho_a.matrix(), rho_b.matrix());
    let back_a = partial_trace(&prod, 2, 3, Subsystem::B).unwrap();
    let back_b = partial_trace(&prod, 2, 3, Subsystem::A).unwrap();
    assert!(max_abs(&(back_a - rho_a.matrix())) <= 1e-13);
    assert!(max_abs(&(back_b - rho_b.matrix())) <= 1e-13);
    let _ = KrausChannel::identity(6);
}
