//! Constrained linear suprema over states, operator E-norms, and constrained
//! minimal output entropy of Kraus channels.
//!
//! Linear objectives are solved exactly by minimizing the convex dual
//! g(lambda) = lambda E + lambda_max(M - lambda H) over lambda >= 0 with a
//! subgradient bisection; the primal optimizer is recovered from the top
//! eigenspace, rotated inside a two-dimensional slice when the constraint
//! must hold with equality. Nonlinear objectives (output entropy, norms on
//! the unit sphere) run a projected-gradient method on the sphere with
//! active-set handling of the quadratic constraint and multi-restart.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::constraint::HermitianObservable;
use crate::error::{Error, Result};
use crate::matrix::{self, check_same_dim, max_abs, CMat, CVec, EigH};
use crate::state::{DensityOperator, PureState};
use crate::tol;

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<CMat>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Validation {
            detail: "a channel needs at least one Kraus operator".into(),
        })?;
        let (d_out, d_in) = (first.nrows(), first.ncols());
        let mut completeness = CMat::from_element(d_in, d_in, matrix::C_ZERO);
        for k in &kraus {
            if k.nrows() != d_out || k.ncols() != d_in {
                return Err(Error::DimensionMismatch {
                    left: k.nrows(),
                    right: d_out,
                });
            }
            completeness += k.adjoint() * k;
        }
        let defect = max_abs(&(&completeness - matrix::identity(d_in)));
        if defect > 1e-9 {
            return Err(Error::Validation {
                detail: format!("Kraus completeness defect {:.3e} exceeds 1e-9", defect),
            });
        }
        Ok(Self { d_in, d_out, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![matrix::identity(d)]).expect("identity is a channel")
    }

    pub fn unitary(u: CMat) -> Result<Self> {
        let defect = max_abs(&(u.adjoint() * &u - matrix::identity(u.ncols())));
        if defect > 1e-9 {
            return Err(Error::Validation {
                detail: format!("matrix is not unitary (defect {:.3e})", defect),
            });
        }
        Self::new(vec![u])
    }

    /// Qubit channel sending every state to the trace state.
    pub fn depolarizing_qubit() -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let half = 0.5;
        let ops = vec![
            matrix::identity(2).scale(half),
            CMat::from_row_slice(2, 2, &[c(0., 0.), c(half, 0.), c(half, 0.), c(0., 0.)]),
            CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -half), c(0., half), c(0., 0.)]),
            CMat::from_row_slice(2, 2, &[c(half, 0.), c(0., 0.), c(0., 0.), c(-half, 0.)]),
        ];
        Self::new(ops).expect("depolarizing Kraus set is complete")
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Validation {
                detail: format!("damping rate {} outside [0, 1]", gamma),
            });
        }
        let c = |re: f64| Complex64::new(re, 0.0);
        let k0 = CMat::from_row_slice(
            2,
            2,
            &[c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())],
        );
        let k1 = CMat::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]);
        Self::new(vec![k0, k1])
    }

    pub fn input_dim(&self) -> usize {
        self.d_in
    }

    pub fn output_dim(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    /// sum_j K_j X K_j^dagger.
    pub fn apply_mat(&self, x: &CMat) -> CMat {
        let mut out = CMat::from_element(self.d_out, self.d_out, matrix::C_ZERO);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    /// Adjoint map sum_j K_j^dagger Y K_j.
    pub fn apply_adjoint(&self, y: &CMat) -> CMat {
        let mut out = CMat::from_element(self.d_in, self.d_in, matrix::C_ZERO);
        for k in &self.kraus {
            out += k.adjoint() * y * k;
        }
        out
    }

    /// Complementary channel into the environment of the Stinespring
    /// dilation: output entries Tr(K_j rho K_k^dagger).
    pub fn complementary(&self) -> Self {
        let n = self.kraus.len();
        let ops: Vec<CMat> = (0..self.d_out)
            .map(|e| CMat::from_fn(n, self.d_in, |j, i| self.kraus[j][(e, i)]))
            .collect();
        Self::new(ops).expect("complementary Kraus set is complete")
    }
}

/// Kraus action on a state, validated on the way out.
pub fn apply_channel(phi: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    check_same_dim(phi.d_in, rho.dim())?;
    DensityOperator::new(phi.apply_mat(rho.matrix()))
}

/// Von Neumann entropy in natural-log units.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of_spectrum(rho.eigenvalues())
}

pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&l| l > tol::TAU_PSD)
        .map(|&l| -l * l.ln())
        .sum();
    debug_assert!(s >= -1e-12);
    // Magnitudes below the eigensolver's resolution round to exact zero, so
    // pure spectra report entropy 0 rather than +-2e-16.
    if s <= 1e-13 {
        0.0
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OptStatus {
    Converged,
    MaxIter,
    Infeasible,
}

/// Outcome of a constrained optimization run.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub value: f64,
    pub state: PureState,
    /// Dual multiplier, when the method produces one.
    pub dual: Option<f64>,
    pub iterations: usize,
    pub restarts_used: u32,
    pub status: OptStatus,
}

struct TopBlock {
    g_max: f64,
    h_min: f64,
    h_max: f64,
    v_min: CVec,
    v_max: CVec,
}

/// Top eigenspace of M - lambda H within `gap` of the largest eigenvalue,
/// with the extreme values of <H> over that eigenspace.
fn top_block(m: &CMat, h: &CMat, lambda: f64, gap: f64) -> TopBlock {
    let shifted = m - h.scale(lambda);
    let eig = EigH::new(&shifted);
    let g_max = eig.lambda_max();
    let k = eig
        .values
        .iter()
        .take_while(|&&v| g_max - v <= gap)
        .count()
        .max(1);
    let basis = CMat::from_fn(m.nrows(), k, |i, j| eig.vectors[(i, j)]);
    let compressed = matrix::hermitian_part(&(basis.adjoint() * h * &basis));
    let ceig = EigH::new(&compressed);
    let v_max = &basis * ceig.vectors.column(0);
    let v_min = &basis * ceig.vectors.column(k - 1);
    TopBlock {
        g_max,
        h_min: ceig.lambda_min(),
        h_max: ceig.lambda_max(),
        v_min: v_min.column(0).into_owned(),
        v_max: v_max.column(0).into_owned(),
    }
}

/// Unit vector in span{v_lo, v_hi} with <H> = e, assuming the quadratic form
/// straddles e on the two inputs. The relative phase is chosen to cancel the
/// cross term so the form is monotone along the rotation.
fn rotate_to_bound(v_lo: &CVec, v_hi: &CVec, h: &CMat, e: f64) -> PureState {
    // Orthonormalize v_hi against v_lo.
    let overlap = (v_lo.adjoint() * v_hi)[(0, 0)];
    let mut w = v_hi - v_lo.scale_complex(overlap);
    let nw = w.norm();
    if nw < 1e-12 {
        return PureState::from_unnormalized(v_lo.clone()).expect("nonzero");
    }
    w /= Complex64::new(nw, 0.0);
    let h_ll = (v_lo.adjoint() * h * v_lo)[(0, 0)].re;
    let h_ww = (w.adjoint() * h * &w)[(0, 0)].re;
    let cross = (v_lo.adjoint() * h * &w)[(0, 0)];
    // Phase theta kills the cross term Re(e^{i theta} <lo|H|w>).
    let phase = if cross.norm() > 1e-15 {
        Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 - cross.arg())
    } else {
        Complex64::new(1.0, 0.0)
    };
    let w = w.scale_complex(phase);
    // q(t) = cos^2 t * h_ll + sin^2 t * h_ww.
    let denom = h_ww - h_ll;
    let t = if denom.abs() < 1e-15 {
        0.0
    } else {
        ((e - h_ll) / denom).clamp(0.0, 1.0).sqrt().asin()
    };
    let v = v_lo.scale(t.cos()) + w.scale(t.sin());
    PureState::from_unnormalized(v).expect("unit combination")
}

trait ScaleComplex {
    fn scale_complex(&self, c: Complex64) -> CVec;
}

impl ScaleComplex for CVec {
    fn scale_complex(&self, c: Complex64) -> CVec {
        self.map(|x| x * c)
    }
}

/// sup { Tr(M rho) : Tr(H rho) <= E } over states, solved by dual
/// eigenvalue bisection; the optimizer returned is pure.
pub fn constrained_linear_max(
    m: &HermitianObservable,
    h: &HermitianObservable,
    e: f64,
) -> Result<OptimizationResult> {
    check_same_dim(m.dim(), h.dim())?;
    let hm = h.matrix();
    let mm = m.matrix();
    let h_eig = EigH::new(hm);
    let lambda_min_h = h_eig.lambda_min();
    if e < lambda_min_h - tol::tau_act(e) {
        return Err(Error::Infeasible {
            detail: format!("bound {} below the minimal expected value {}", e, lambda_min_h),
        });
    }
    let scale_m = EigH::new(mm).values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let scale_h = h_eig.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let base_gap = 1e-9 * (scale_m + scale_h).max(1.0);

    if e <= lambda_min_h + tol::tau_act(e) {
        // The bound pins the feasible set to the bottom eigenspace of H,
        // where the dual multiplier diverges; solve the compressed problem
        // exactly instead.
        let d = h.dim();
        let gap = 1e-9 * scale_h.max(1.0);
        let k = h_eig
            .values
            .iter()
            .filter(|&&v| v <= lambda_min_h + gap)
            .count()
            .max(1);
        let basis = CMat::from_fn(d, k, |i, j| h_eig.vectors[(i, d - k + j)]);
        let compressed = matrix::hermitian_part(&(basis.adjoint() * mm * &basis));
        let ceig = EigH::new(&compressed);
        let lifted = &basis * ceig.vectors.column(0);
        let state = PureState::from_unnormalized(lifted.column(0).into_owned())?;
        let value = state.quadratic_form(mm);
        return Ok(OptimizationResult {
            value,
            state,
            dual: None,
            iterations: 0,
            restarts_used: 0,
            status: OptStatus::Converged,
        });
    }

    let block0 = top_block(mm, hm, 0.0, base_gap);
    let slack = tol::tau_act(e);
    if block0.h_min <= e + slack {
        // Unconstrained optimum is feasible (rotated tight if only part of
        // the top eigenspace is).
        let state = if block0.h_max <= e + slack {
            PureState::from_unnormalized(block0.v_max.clone())?
        } else {
            rotate_to_bound(&block0.v_min, &block0.v_max, hm, e)
        };
        let value = state.quadratic_form(mm);
        return Ok(OptimizationResult {
            value,
            state,
            dual: Some(0.0),
            iterations: 0,
            restarts_used: 0,
            status: OptStatus::Converged,
        });
    }

    // Bracket: find lambda with h_min(lambda) <= e.
    let mut lo = 0.0f64;
    let mut hi = 2.0 * scale_m.max(1.0) / slack.max(e - lambda_min_h);
    let mut iterations = 0usize;
    for _ in 0..60 {
        if top_block(mm, hm, hi, base_gap).h_min <= e {
            break;
        }
        hi *= 2.0;
        iterations += 1;
    }
    for _ in 0..200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if top_block(mm, hm, mid, base_gap).h_min > e {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    // Widen the eigenspace gap by the bracket width so both crossing
    // branches are visible at the endpoint.
    let gap = base_gap + 4.0 * (hi - lo) * scale_h.max(1.0);
    let block = top_block(mm, hm, hi, gap);
    let state = if block.h_max >= e - slack && block.h_min <= e + slack {
        rotate_to_bound(&block.v_min, &block.v_max, hm, e)
    } else if block.h_max < e {
        PureState::from_unnormalized(block.v_max.clone())?
    } else {
        PureState::from_unnormalized(block.v_min.clone())?
    };
    let feasibility = state.quadratic_form(hm) - e;
    if feasibility > slack {
        return Err(Error::NoConvergence {
            detail: format!(
                "recovered optimizer violates the bound by {:.3e} at lambda = {:.6e}",
                feasibility, hi
            ),
        });
    }
    let value = state.quadratic_form(mm);
    let dual_value = hi * e + block.g_max;
    let gap_primal_dual = (value - dual_value).abs();
    if gap_primal_dual > 1e-7 * (scale_m + scale_h.max(1.0) * e.abs()).max(1.0) {
        return Err(Error::NoConvergence {
            detail: format!(
                "duality gap {:.3e} at lambda = {:.6e}",
                gap_primal_dual, hi
            ),
        });
    }
    Ok(OptimizationResult {
        value,
        state,
        dual: Some(hi),
        iterations,
        restarts_used: 0,
        status: OptStatus::Converged,
    })
}

/// Shifts H so its smallest eigenvalue is zero, adjusting E to keep the
/// feasible set unchanged. Returns the shift applied.
fn normalize_floor(h: &HermitianObservable, e: f64) -> Result<(HermitianObservable, f64, f64)> {
    let lambda_min = h.lambda_min();
    if lambda_min < 0.0 {
        let shifted = HermitianObservable::new(
            h.matrix() - matrix::identity(h.dim()).scale(lambda_min),
            h.name().map(str::to_owned),
        )?;
        Ok((shifted, e - lambda_min, lambda_min))
    } else {
        Ok((h.clone(), e, 0.0))
    }
}

/// Operator E-norm via the dual route: sqrt of the constrained supremum of
/// Tr(A^dagger A rho).
pub fn enorm_dual(a: &CMat, h: &HermitianObservable, e: f64) -> Result<f64> {
    check_same_dim(a.ncols(), h.dim())?;
    let (h, e, _) = normalize_floor(h, e)?;
    let gram = HermitianObservable::new(a.adjoint() * a, None)?;
    let result = constrained_linear_max(&gram, &h, e)?;
    Ok(result.value.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BoundKind {
    Sublevel,
    Level,
}

/// Projected-gradient descent on the unit sphere with one quadratic
/// constraint <x|H|x> <= e or = e. Minimizes `f`.
struct SphereSolver<'a> {
    f: &'a dyn Fn(&CVec) -> f64,
    grad: &'a dyn Fn(&CVec) -> CVec,
    h: &'a CMat,
    e: f64,
    kind: BoundKind,
    max_iter: usize,
    grad_tol: f64,
}

fn resphere(v: &CVec) -> CVec {
    v.scale(1.0 / v.norm())
}

fn quad(h: &CMat, x: &CVec) -> f64 {
    (x.adjoint() * h * x)[(0, 0)].re
}

impl<'a> SphereSolver<'a> {
    /// Newton iteration toward the level set {<x|H|x> = e} on the sphere.
    fn clamp_to_level(&self, x: &CVec) -> CVec {
        let mut x = x.clone();
        for _ in 0..8 {
            let q0 = quad(self.h, &x);
            if (q0 - self.e).abs() <= 1e-13 * self.e.abs().max(1.0) {
                break;
            }
            let hx = self.h * &x;
            let u = &hx - x.scale(q0);
            let nu2 = u.norm_squared();
            if nu2 < 1e-18 {
                break;
            }
            let t = (self.e - q0) / (2.0 * nu2);
            x = resphere(&(&x + u.scale(t)));
        }
        x
    }

    /// Gradient descent, then a boundary polish for sublevel runs that end
    /// near the constraint surface: the thin activity band makes interior
    /// steps zigzag against the clamp, while the level-manifold solver
    /// converges cleanly. The better of the two points wins.
    fn solve(&self, x0: &CVec) -> (CVec, f64, usize, bool) {
        let (x, fx, iters, conv) = self.run(x0);
        if self.kind != BoundKind::Sublevel {
            return (x, fx, iters, conv);
        }
        let q = quad(self.h, &x);
        if q < self.e - 1e-4 * self.e.abs().max(1.0) {
            return (x, fx, iters, conv);
        }
        let boundary = SphereSolver {
            kind: BoundKind::Level,
            ..*self
        };
        let (bx, bfx, biters, bconv) = boundary.run(&self.clamp_to_level(&x));
        if bfx < fx {
            (bx, bfx, iters + biters, bconv)
        } else {
            (x, fx, iters + biters, conv)
        }
    }

    fn run(&self, x0: &CVec) -> (CVec, f64, usize, bool) {
        let mut x = x0.clone();
        if self.kind == BoundKind::Level {
            x = self.clamp_to_level(&x);
        }
        let mut fx = (self.f)(&x);
        let mut step = 1.0;
        let slack = tol::tau_act(self.e);
        let mut converged = false;
        let mut iters = 0;
        for it in 0..self.max_iter {
            iters = it + 1;
            let g = (self.grad)(&x);
            let rg = &g - x.scale(x.dotc(&g).re);
            let hx = self.h * &x;
            let q0 = quad(self.h, &x);
            let u = &hx - x.scale(q0);
            let project_constraint = match self.kind {
                BoundKind::Level => true,
                BoundKind::Sublevel => {
                    // Active when tight and the raw descent step would exit.
                    q0 >= self.e - slack && {
                        let outward = (-&rg).dotc(&u).re;
                        outward > 0.0
                    }
                }
            };
            let mut d = -&rg;
            if project_constraint {
                let nu2 = u.norm_squared();
                if nu2 > 1e-18 {
                    let mu = rg.dotc(&u).re / nu2;
                    d += u.scale(mu);
                }
            }
            let dn = d.norm();
            if dn <= self.grad_tol {
                converged = true;
                break;
            }
            // Backtracking line search with retraction.
            let mut t = step;
            let mut accepted = false;
            for _ in 0..40 {
                let mut cand = resphere(&(&x + d.scale(t)));
                match self.kind {
                    BoundKind::Level => cand = self.clamp_to_level(&cand),
                    BoundKind::Sublevel => {
                        if quad(self.h, &cand) > self.e + slack {
                            cand = self.clamp_to_level(&cand);
                        }
                    }
                }
                let fc = (self.f)(&cand);
                if fc <= fx - 1e-4 * t * dn * dn {
                    x = cand;
                    fx = fc;
                    step = (t * 2.0).min(1e3);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                converged = dn <= self.grad_tol * 1e3;
                break;
            }
        }
        (x, fx, iters, converged)
    }
}

fn haar_vector(d: usize, rng: &mut impl Rng) -> CVec {
    use rand_distr::StandardNormal;
    let v = CVec::from_fn(d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    resphere(&v)
}

/// Blends x toward `target` along the sphere until <H> crosses e; used to
/// produce feasible starting points.
fn blend_to_feasible(x: &CVec, target: &CVec, h: &CMat, e: f64) -> CVec {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let point = |t: f64| resphere(&(x.scale(1.0 - t) + target.scale(t)));
    if quad(h, &point(0.0)) <= e {
        return x.clone();
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if quad(h, &point(mid)) > e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    point(hi)
}

/// Operator E-norm via the sphere route: sup ||A x|| over unit vectors with
/// <x|H|x> <= e, by multi-restart projected-gradient ascent.
pub fn enorm_pure(
    a: &CMat,
    h: &HermitianObservable,
    e: f64,
    restarts: u32,
    seed: u64,
) -> Result<OptimizationResult> {
    check_same_dim(a.ncols(), h.dim())?;
    let (h, e, _) = normalize_floor(h, e)?;
    let d = h.dim();
    let hm = h.matrix().clone();
    let gram = matrix::hermitian_part(&(a.adjoint() * a));
    let f = |x: &CVec| -quad(&gram, x);
    let grad = |x: &CVec| (&gram * x).scale(-2.0);
    let solver = SphereSolver {
        f: &f,
        grad: &grad,
        h: &hm,
        e,
        kind: BoundKind::Sublevel,
        max_iter: 2000,
        grad_tol: 1e-10 * max_abs(&gram).max(1.0),
    };
    let h_eig = EigH::new(&hm);
    let ground: CVec = h_eig.vectors.column(d - 1).into_owned();
    if quad(&hm, &ground) > e + tol::tau_act(e) {
        return Err(Error::Infeasible {
            detail: format!("bound {} below the spectral floor of H", e),
        });
    }
    let gram_eig = EigH::new(&gram);
    let top: CVec = gram_eig.vectors.column(0).into_owned();

    let mut best: Option<(f64, CVec, usize, bool)> = None;
    let mut total_iters = 0usize;
    let mut used = 0u32;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(r as u64 + 1);
        let x0 = match r {
            // Structured starts: the unconstrained optimum blended to
            // feasibility, and the spectral floor of H.
            0 => blend_to_feasible(&top, &ground, &hm, e),
            1 => ground.clone(),
            _ => {
                let x = haar_vector(d, &mut rng);
                blend_to_feasible(&x, &ground, &hm, e)
            }
        };
        let (x, fx, iters, conv) = solver.run(&x0);
        total_iters += iters;
        used = r + 1;
        if best.as_ref().map_or(true, |(bf, ..)| fx < *bf) {
            best = Some((fx, x, iters, conv));
        }
    }
    let (fx, x, _, conv) = best.expect("at least one restart");
    let value = (-fx).max(0.0).sqrt();
    Ok(OptimizationResult {
        value,
        state: PureState::from_unnormalized(x)?,
        dual: None,
        iterations: total_iters,
        restarts_used: used,
        status: if conv {
            OptStatus::Converged
        } else {
            OptStatus::MaxIter
        },
    })
}

/// Constrained minimal output entropy of a channel over pure inputs with
/// <x|H|x> <= E (sublevel) or = E (level), by multi-restart Riemannian
/// descent.
pub fn min_output_entropy(
    phi: &KrausChannel,
    h: &HermitianObservable,
    e: f64,
    kind: crate::constraint::ConstraintKind,
    restarts: u32,
    seed: u64,
) -> Result<OptimizationResult> {
    check_same_dim(phi.input_dim(), h.dim())?;
    let h_eig = EigH::new(h.matrix());
    let (l_min, l_max) = (h_eig.lambda_min(), h_eig.lambda_max());
    let bound_kind = match kind {
        crate::constraint::ConstraintKind::Sublevel => BoundKind::Sublevel,
        crate::constraint::ConstraintKind::Level => BoundKind::Level,
    };
    let slack = tol::tau_act(e);
    match bound_kind {
        BoundKind::Sublevel if e < l_min - slack => {
            return Err(Error::Infeasible {
                detail: format!("bound {} below the spectral floor {}", e, l_min),
            });
        }
        BoundKind::Level if e < l_min - slack || e > l_max + slack => {
            return Err(Error::Infeasible {
                detail: format!("level value {} outside the spectrum [{}, {}]", e, l_min, l_max),
            });
        }
        _ => {}
    }
    let d = phi.input_dim();
    let hm = h.matrix().clone();
    let f = |x: &CVec| {
        let out = phi.apply_mat(&(x * x.adjoint()));
        entropy_of_spectrum(&EigH::new(&out).values)
    };
    let grad = |x: &CVec| {
        let out = phi.apply_mat(&(x * x.adjoint()));
        let eig = EigH::new(&out);
        // d/d rho of Tr eta(rho) is -ln(rho) - 1; eigenvalues are floored to
        // keep the logarithm finite near pure outputs.
        let l = eig.apply_spectral(|lam| -(lam.max(1e-15)).ln() - 1.0);
        (phi.apply_adjoint(&l) * x).scale(2.0)
    };
    let solver = SphereSolver {
        f: &f,
        grad: &grad,
        h: &hm,
        e,
        kind: bound_kind,
        max_iter: 600,
        grad_tol: 1e-8,
    };
    let ground: CVec = h_eig.vectors.column(d - 1).into_owned();
    let mut best: Option<(f64, CVec, bool)> = None;
    let mut total_iters = 0usize;
    let mut used = 0u32;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(r as u64 + 1);
        let x0 = match bound_kind {
            BoundKind::Sublevel => {
                if r == 0 {
                    ground.clone()
                } else {
                    blend_to_feasible(&haar_vector(d, &mut rng), &ground, &hm, e)
                }
            }
            BoundKind::Level => haar_vector(d, &mut rng),
        };
        let (x, fx, iters, conv) = solver.run(&x0);
        total_iters += iters;
        used = r + 1;
        // Reject runs that drifted infeasible.
        let q = quad(&hm, &x);
        let ok = match bound_kind {
            BoundKind::Sublevel => q <= e + 10.0 * slack,
            BoundKind::Level => (q - e).abs() <= 10.0 * slack,
        };
        if ok && best.as_ref().map_or(true, |(bf, ..)| fx < *bf) {
            best = Some((fx, x, conv));
        }
    }
    let Some((fx, x, conv)) = best else {
        return Err(Error::NoConvergence {
            detail: "no restart produced a feasible point".into(),
        });
    };
    Ok(OptimizationResult {
        value: fx.max(0.0),
        state: PureState::from_unnormalized(x)?,
        dual: None,
        iterations: total_iters,
        restarts_used: used,
        status: if conv {
            OptStatus::Converged
        } else {
            OptStatus::MaxIter
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::ConstraintKind;
    use crate::matrix::{identity, CVec};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(entries: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_vec(entries.iter().map(|&x| c(x, 0.0)).collect()))
    }

    fn pauli(which: char) -> CMat {
        match which {
            'x' => CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
            'y' => CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
            'z' => diag(&[1.0, -1.0]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityOperator::from_pure(&PureState::basis_state(2, 0));
        assert_eq!(von_neumann_entropy(&pure), 0.0);
        let mixed = DensityOperator::maximally_mixed(2);
        assert_relative_eq!(von_neumann_entropy(&mixed), 2f64.ln(), epsilon = 1e-14);
        let skew = DensityOperator::new(diag(&[0.75, 0.25])).unwrap();
        let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert_relative_eq!(von_neumann_entropy(&skew), expected, epsilon = 1e-14);
        assert_relative_eq!(expected, 0.5623351446188083, epsilon = 1e-15);
    }

    #[test]
    fn linear_max_unconstrained_when_h_vanishes() {
        let m = HermitianObservable::new(pauli('z'), None).unwrap();
        let h = HermitianObservable::new(diag(&[0.0, 0.0]), None).unwrap();
        let r = constrained_linear_max(&m, &h, 0.5).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-10);
        assert!(constrained_linear_max(&m, &h, -0.5).is_err());
    }

    #[test]
    fn linear_max_bloch_example() {
        // Maximize z subject to x <= 0: optimum 1 at the north pole.
        let m = HermitianObservable::new(pauli('z'), None).unwrap();
        let h = HermitianObservable::new(identity(2) + pauli('x'), None).unwrap();
        let r = constrained_linear_max(&m, &h, 1.0).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-8);
        let x_val = r.state.quadratic_form(&pauli('x'));
        assert!(x_val <= 1e-7);
        assert_relative_eq!(r.state.quadratic_form(&pauli('z')), 1.0, epsilon = 1e-7);
    }

    #[test]
    fn enorm_identity_and_pinned_cases() {
        let h = HermitianObservable::new(diag(&[0.0, 1.0]), None).unwrap();
        for e in [0.0, 0.3, 2.0] {
            assert_relative_eq!(
                enorm_dual(&identity(2), &h, e).unwrap(),
                1.0,
                epsilon = 1e-9
            );
        }
        // A = diag(1, 3), E = 0: only the first basis state is feasible.
        let a = diag(&[1.0, 3.0]);
        assert_relative_eq!(enorm_dual(&a, &h, 0.0).unwrap(), 1.0, epsilon = 1e-7);
        // E beyond the spectrum of H: the plain operator norm.
        assert_relative_eq!(enorm_dual(&a, &h, 1.5).unwrap(), 3.0, epsilon = 1e-8);
    }

    #[test]
    fn enorm_routes_agree_on_qubit() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.2), c(0.3, -0.4), c(0.0, 1.1), c(0.5, 0.0)]);
        let h = HermitianObservable::new(identity(2) + pauli('z'), None).unwrap();
        let e = 0.7;
        let dual = enorm_dual(&a, &h, e).unwrap();
        let pure = enorm_pure(&a, &h, e, 16, 42).unwrap();
        assert!((dual - pure.value).abs() < 1e-6, "dual {dual} pure {}", pure.value);
    }

    #[test]
    fn channels_behave() {
        let rho = DensityOperator::new(diag(&[0.6, 0.4])).unwrap();
        let id = KrausChannel::identity(2);
        assert!(max_abs(&(apply_channel(&id, &rho).unwrap().matrix() - rho.matrix())) < 1e-14);

        let u = CMat::from_row_slice(
            2,
            2,
            &[
                c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                c(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        );
        let hada = KrausChannel::unitary(u.clone()).unwrap();
        let out = apply_channel(&hada, &rho).unwrap();
        assert_relative_eq!(
            von_neumann_entropy(&out),
            von_neumann_entropy(&rho),
            epsilon = 1e-12
        );

        let depol = KrausChannel::depolarizing_qubit();
        let out = apply_channel(&depol, &rho).unwrap();
        assert!(max_abs(&(out.matrix() - identity(2).scale(0.5))) < 1e-12);
    }

    #[test]
    fn min_entropy_identity_and_depolarizing() {
        let h = HermitianObservable::new(diag(&[0.0, 1.0]), None).unwrap();
        let id = KrausChannel::identity(2);
        let r = min_output_entropy(&id, &h, 0.4, ConstraintKind::Sublevel, 8, 7).unwrap();
        assert!(r.value <= 1e-10, "identity channel min entropy {}", r.value);

        let depol = KrausChannel::depolarizing_qubit();
        let r = min_output_entropy(&depol, &h, 0.4, ConstraintKind::Sublevel, 4, 7).unwrap();
        assert_relative_eq!(r.value, 2f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn complementary_channel_entropy_matches_on_pure_inputs() {
        let phi = KrausChannel::amplitude_damping(0.5).unwrap();
        let comp = phi.complementary();
        let psi = PureState::from_unnormalized(CVec::from_vec(vec![c(0.6, 0.1), c(0.5, -0.4)]))
            .unwrap();
        let rho = DensityOperator::from_pure(&psi);
        let s1 = von_neumann_entropy(&apply_channel(&phi, &rho).unwrap());
        let s2 = von_neumann_entropy(&apply_channel(&comp, &rho).unwrap());
        assert_relative_eq!(s1, s2, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_bounds_rejected() {
        let h = HermitianObservable::new(diag(&[0.0, 1.0]), None).unwrap();
        let id = KrausChannel::identity(2);
        assert!(matches!(
            min_output_entropy(&id, &h, -0.5, ConstraintKind::Sublevel, 2, 1),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(
            min_output_entropy(&id, &h, 1.5, ConstraintKind::Level, 2, 1),
            Err(Error::Infeasible { .. })
        ));
    }
}
