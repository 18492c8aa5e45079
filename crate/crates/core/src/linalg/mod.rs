//! Dense complex linear algebra: Kronecker products, partial traces,
//! Hermitian spectra, operator norms and positivity tests.

mod eigen;
mod matrix;

pub(crate) use eigen::{householder_qr, solve_gram};
pub use matrix::{ComplexMatrix, C64, ONE, ZERO};

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};

/// Absolute/relative tolerance pair used by every approximate comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs >= 0.0 && rel >= 0.0) {
            return Err(Error::InvalidDimension(format!(
                "tolerances must be nonnegative, got abs = {abs}, rel = {rel}"
            )));
        }
        Ok(Tolerance { abs, rel })
    }

    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    /// Allowed error for a quantity of magnitude `scale`.
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }

    pub fn is_small(&self, x: f64, scale: f64) -> bool {
        x.abs() <= self.bound(scale)
    }

    pub fn close(&self, a: C64, b: C64) -> bool {
        (a - b).norm() <= self.bound(a.norm().max(b.norm()))
    }
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

/// Kronecker product with `(a ⊗ b)[i·rb + k, j·cb + l] = a[i, j] · b[k, l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// `tr₁` (side = First, result `d2 × d2`) or `tr₂` (side = Second, result `d1 × d1`)
/// of an operator on `C^{d1} ⊗ C^{d2}`.
pub fn partial_trace(side: Side, t: &ComplexMatrix, d1: usize, d2: usize) -> Result<ComplexMatrix> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::InvalidDimension(
            "partial trace factors must be positive".into(),
        ));
    }
    let n = d1 * d2;
    if t.shape() != (n, n) {
        return Err(mismatch(
            "partial_trace",
            format!("{n}x{n}"),
            format!("{:?}", t.shape()),
        ));
    }
    Ok(match side {
        Side::First => ComplexMatrix::from_fn(d2, d2, |j, l| {
            (0..d1).map(|i| t[(i * d2 + j, i * d2 + l)]).sum()
        }),
        Side::Second => ComplexMatrix::from_fn(d1, d1, |i, k| {
            (0..d2).map(|j| t[(i * d2 + j, k * d2 + j)]).sum()
        }),
    })
}

fn hermiticity_defect(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] - a[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

fn check_hermitian(a: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    if !a.is_square() {
        return Err(mismatch(
            "hermitian_eigenvalues",
            "square matrix",
            format!("{:?}", a.shape()),
        ));
    }
    let defect = hermiticity_defect(a);
    let allowed = tol.bound(a.frobenius_norm());
    if defect > allowed {
        return Err(Error::NotHermitian {
            deviation: defect,
            allowed,
        });
    }
    Ok(())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: &ComplexMatrix, tol: Tolerance) -> Result<Vec<f64>> {
    check_hermitian(a, tol)?;
    Ok(eigen::jacobi(a, false).0)
}

/// Ascending eigenvalues plus a unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(a: &ComplexMatrix, tol: Tolerance) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(a, tol)?;
    let (values, vectors) = eigen::jacobi(a, true);
    Ok((values, vectors.expect("eigenvectors requested")))
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    let ah = a.adjoint();
    let gram = if a.rows() >= a.cols() {
        &ah * a
    } else {
        a * &ah
    };
    let (values, _) = eigen::jacobi(&gram, false);
    values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Hilbert–Schmidt inner product `tr(a^* b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(mismatch(
            "hs_inner",
            format!("{:?}", a.shape()),
            format!("{:?}", b.shape()),
        ));
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Output dimension `n` of a superoperator matrix of shape `n² × d_in²`,
/// checking that both sides are perfect squares.
pub fn superop_dims(superop: &ComplexMatrix) -> Result<(usize, usize)> {
    let isqrt = |k: usize| {
        let r = (k as f64).sqrt().round() as usize;
        (r * r == k).then_some(r)
    };
    match (isqrt(superop.cols()), isqrt(superop.rows())) {
        (Some(d_in), Some(d_out)) => Ok((d_in, d_out)),
        _ => Err(mismatch(
            "superoperator",
            "shape n² × d²",
            format!("{:?}", superop.shape()),
        )),
    }
}

/// Applies a superoperator matrix (acting on column-major vectorizations)
/// to a square matrix.
pub fn superop_apply(superop: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (d_in, d_out) = superop_dims(superop)?;
    if x.shape() != (d_in, d_in) {
        return Err(mismatch(
            "superop_apply",
            format!("{d_in}x{d_in}"),
            format!("{:?}", x.shape()),
        ));
    }
    let v = superop.mul_vec(&x.vec_columns());
    ComplexMatrix::from_vec_columns(d_out, d_out, &v)
}

/// Superoperator matrix of a linear map on `d_in × d_in` matrices whose
/// images are `d_out × d_out`; column `a + b·d_in` is `vec(f(e_a e_b^*))`.
pub fn superop_from_map(
    d_in: usize,
    d_out: usize,
    mut f: impl FnMut(&ComplexMatrix) -> ComplexMatrix,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d_out * d_out, d_in * d_in);
    let mut unit = ComplexMatrix::zeros(d_in, d_in);
    for b in 0..d_in {
        for a in 0..d_in {
            unit[(a, b)] = ONE;
            let image = f(&unit);
            assert_eq!(
                image.shape(),
                (d_out, d_out),
                "map image has the wrong shape"
            );
            for (r, z) in image.vec_columns().into_iter().enumerate() {
                out[(r, a + b * d_in)] = z;
            }
            unit[(a, b)] = ZERO;
        }
    }
    out
}

/// Smallest eigenvalue after a hermiticity check, or `None` when `a` is not Hermitian within `tol`.
pub fn min_eigenvalue(a: &ComplexMatrix, tol: Tolerance) -> Option<f64> {
    hermitian_eigenvalues(a, tol)
        .ok()
        .and_then(|v| v.first().copied())
}

/// Positive semidefiniteness: Hermitian within `tol` and
/// `λ_min ≥ −(tol.abs + tol.rel·‖a‖)`.
pub fn is_psd(a: &ComplexMatrix, tol: Tolerance) -> bool {
    if !a.is_square() {
        return false;
    }
    match hermitian_eigenvalues(a, tol) {
        Ok(values) => {
            let norm = values.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
            values[0] >= -tol.bound(norm)
        }
        Err(_) => false,
    }
}
