//! Dense complex matrices, the Hermitian eigendecomposition used as the
//! single spectral primitive, and the real coordinatization of Hermitian
//! matrices used by the face machinery.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tol;

/// Dense complex matrix, the working representation everywhere.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVec = DVector<Complex64>;
/// Dense real matrix (constraint maps, coordinate stacks).
pub type RMat = DMatrix<f64>;
/// Dense real vector.
pub type RVec = DVector<f64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix with the `[[ [re, im], ... ], ...]` JSON form.
///
/// Entries serialize row by row as `[re, im]` pairs of binary64 values;
/// non-finite entries are rejected in both directions so files round-trip
/// bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(pub CMat);

impl ComplexMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                left: mat.nrows(),
                right: mat.ncols(),
            });
        }
        if mat.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Validation {
                detail: "matrix contains NaN or infinite entries".into(),
            });
        }
        Ok(Self(mat))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn as_mat(&self) -> &CMat {
        &self.0
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.0.nrows();
        let mut rows: Vec<Vec<[f64; 2]>> = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let c = self.0[(i, j)];
                if !c.re.is_finite() || !c.im.is_finite() {
                    return Err(serde::ser::Error::custom("non-finite matrix entry"));
                }
                row.push([c.re, c.im]);
            }
            rows.push(row);
        }
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let d = rows.len();
        if d == 0 {
            return Err(D::Error::custom("empty matrix"));
        }
        let mut mat = CMat::from_element(d, d, C_ZERO);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(D::Error::custom(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    d
                )));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(D::Error::custom(format!(
                        "non-finite entry at ({}, {})",
                        i, j
                    )));
                }
                mat[(i, j)] = Complex64::new(re, im);
            }
        }
        Ok(Self(mat))
    }
}

/// Largest entry magnitude (the max norm).
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Max-norm distance to the adjoint.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Hermitian part (M + M^dagger)/2. Idempotent bit-exactly.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Complex trace.
pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().sum()
}

/// Tr(A B) without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    let mut acc = C_ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct EigH {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Matching eigenvector columns, orthonormal.
    pub vectors: CMat,
}

impl EigH {
    /// Decompose a Hermitian matrix. The caller guarantees hermiticity;
    /// only the Hermitian part of `m` influences the result.
    pub fn new(m: &CMat) -> Self {
        let d = m.nrows();
        debug_assert_eq!(d, m.ncols());
        let se = hermitian_part(m).symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| {
            se.eigenvalues[b]
                .partial_cmp(&se.eigenvalues[a])
                .expect("finite eigenvalues")
        });
        let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
        let mut vectors = CMat::from_element(d, d, C_ZERO);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &se.eigenvectors.column(src));
        }
        EigH { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Reassemble sum_k f(lambda_k) v_k v_k^dagger.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> CMat {
        let d = self.dim();
        let mut out = CMat::from_element(d, d, C_ZERO);
        for k in 0..d {
            let v = self.vectors.column(k);
            out += (v * v.adjoint()).scale(f(self.values[k]));
        }
        out
    }
}

/// Real coordinates of an r x r Hermitian matrix: the r diagonal entries,
/// then for each i < j the pair (sqrt2 * Re, -sqrt2 * Im) of the (i, j)
/// entry. The map is an isometry from the trace inner product Tr(AB) to the
/// Euclidean dot product on R^(r^2).
pub fn hermitian_coords(w: &CMat) -> RVec {
    let r = w.nrows();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut v = RVec::zeros(r * r);
    for i in 0..r {
        v[i] = w[(i, i)].re;
    }
    let mut idx = r;
    for i in 0..r {
        for j in (i + 1)..r {
            v[idx] = sqrt2 * w[(i, j)].re;
            v[idx + 1] = -sqrt2 * w[(i, j)].im;
            idx += 2;
        }
    }
    v
}

/// Inverse of [`hermitian_coords`].
pub fn coords_to_hermitian(v: &RVec, r: usize) -> CMat {
    debug_assert_eq!(v.len(), r * r);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = CMat::from_element(r, r, C_ZERO);
    for i in 0..r {
        w[(i, i)] = Complex64::new(v[i], 0.0);
    }
    let mut idx = r;
    for i in 0..r {
        for j in (i + 1)..r {
            let re = v[idx] * inv_sqrt2;
            let im = -v[idx + 1] * inv_sqrt2;
            w[(i, j)] = Complex64::new(re, im);
            w[(j, i)] = Complex64::new(re, -im);
            idx += 2;
        }
    }
    w
}

/// Rank and orthonormal null-space basis of a real matrix, singular values
/// below `rel_cutoff * sigma_max` counting as zero.
pub struct NullSpace {
    pub rank: usize,
    /// Null-space basis vectors ordered most-null first.
    pub basis: Vec<RVec>,
    /// Some singular value lies within a factor 10 of the cutoff, so the
    /// rank decision is a tie rather than a clean split.
    pub near_cutoff: bool,
}

/// Computes the null space via SVD. Wide inputs are padded with zero rows
/// so the factorization exposes the full right-singular basis.
pub fn real_nullspace(c: &RMat, rel_cutoff: f64) -> NullSpace {
    let n = c.ncols();
    let padded;
    let work = if c.nrows() < n {
        padded = {
            let mut p = RMat::zeros(n, n);
            p.view_mut((0, 0), (c.nrows(), n)).copy_from(c);
            p
        };
        &padded
    } else {
        c
    };
    let svd = work.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        let basis = (0..n)
            .map(|k| {
                let mut e = RVec::zeros(n);
                e[k] = 1.0;
                e
            })
            .collect();
        return NullSpace {
            rank: 0,
            basis,
            near_cutoff: false,
        };
    }
    let cutoff = rel_cutoff * sigma_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let near_cutoff = svd
        .singular_values
        .iter()
        .any(|&s| s > cutoff * 0.1 && s < cutoff * 10.0);
    // v_t rows are sorted by descending singular value; rows past `rank`
    // (and implicit padding rows) span the null space.
    let mut basis: Vec<RVec> = (rank..v_t.nrows())
        .map(|k| v_t.row(k).transpose())
        .collect();
    basis.reverse();
    NullSpace {
        rank,
        basis,
        near_cutoff,
    }
}

/// Kronecker product, row-major composite index a*db + b.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub(crate) fn check_same_dim(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Validates hermiticity within `tol::TAU_HERM` scaled by magnitude.
pub fn require_hermitian(m: &CMat) -> Result<()> {
    let defect = hermiticity_defect(m);
    let limit = tol::scaled(tol::TAU_HERM, max_abs(m));
    if defect > limit {
        return Err(Error::Validation {
            detail: format!(
                "matrix is not Hermitian: defect {:.3e} exceeds {:.3e}",
                defect, limit
            ),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigh_sorts_descending_and_reconstructs() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.0, -1.0),
                c(0.3, 0.2),
                c(0.0, 1.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.3, -0.2),
                c(0.0, 0.0),
                c(-0.5, 0.0),
            ],
        );
        let eig = EigH::new(&m);
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let rec = eig.apply_spectral(|x| x);
        assert!(max_abs(&(&rec - &m)) < 1e-12);
    }

    #[test]
    fn coords_roundtrip_isometry() {
        let w = hermitian_part(&CMat::from_fn(4, 4, |i, j| {
            c((i * 7 + j) as f64 * 0.1, (i as f64) - (j as f64) * 0.3)
        }));
        let v = hermitian_coords(&w);
        let back = coords_to_hermitian(&v, 4);
        assert!(max_abs(&(&back - &w)) < 1e-14);
        let hs_norm_sq = trace_product(&w, &w).re;
        assert_relative_eq!(v.dot(&v), hs_norm_sq, epsilon = 1e-12);
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        // Rows e1, e2 in R^4: null space is span{e3, e4}.
        let m = RMat::from_row_slice(2, 4, &[1., 0., 0., 0., 0., 1., 0., 0.]);
        let ns = real_nullspace(&m, 1e-9);
        assert_eq!(ns.rank, 2);
        assert_eq!(ns.basis.len(), 2);
        for b in &ns.basis {
            assert!(b[0].abs() < 1e-12 && b[1].abs() < 1e-12);
            assert_relative_eq!(b.norm(), 1.0, epsilon = 1e-12);
        }
        assert!(!ns.near_cutoff);
    }

    #[test]
    fn matrix_json_roundtrip_bit_exact() {
        let m = ComplexMatrix::new(CMat::from_fn(3, 3, |i, j| {
            c(
                (i as f64 + 0.1).powi(3) / 7.0,
                ((j as f64) - 1.7).exp() / 3.0,
            )
        }))
        .unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        assert!(m
            .as_mat()
            .iter()
            .zip(back.as_mat().iter())
            .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(ComplexMatrix::new(CMat::from_element(2, 2, c(f64::NAN, 0.0))).is_err());
        let bad = "[[[0.0, 0.0]], [[1.0, 2.0]]]";
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }
}
