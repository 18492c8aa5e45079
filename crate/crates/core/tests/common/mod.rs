//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's eigensolver or its coefficient formulas.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use covmap::covmap2::CovariantCoefficients;
use covmap::linalg::{ComplexMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Eigenvalues of the Hermitian part, ascending, from nalgebra.
pub fn eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let a = to_na(m);
    let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    eigenvalues(m)[0]
}

/// Largest singular value, from nalgebra.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    to_na(m)
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Kronecker product written out entrywise.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = b.shape();
    ComplexMatrix::from_fn(a.rows() * p, a.cols() * q, |r, c| {
        a[(r / p, c / q)] * b[(r % p, c % q)]
    })
}

/// Swap on `C^d ⊗ C^d` built from `S(e_i ⊗ e_j) = e_j ⊗ e_i`.
pub fn swap(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (c / d, c % d);
        if r == j * d + i {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    (0..m.rows()).map(|i| m[(i, i)]).sum()
}

/// `Φ(X)` straight from the six-term formula with dense products.
pub fn apply(c: &CovariantCoefficients, x: &ComplexMatrix) -> ComplexMatrix {
    let d = c.d();
    let l = c.coeffs();
    let id = ComplexMatrix::identity(d);
    let s = swap(d);
    let ix = kron(&id, x);
    let xi = kron(x, &id);
    let tr = trace(x);
    let terms = [
        ix.clone(),
        xi.clone(),
        &s * &ix,
        &s * &xi,
        ComplexMatrix::identity(d * d).scale(tr),
        s.scale(tr),
    ];
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for (k, t) in terms.iter().enumerate() {
        out = &out + &t.scale(l[k]);
    }
    out
}

/// Choi matrix `Σ_ij E_ij ⊗ Φ(E_ij)` from the oracle `apply`.
pub fn choi(c: &CovariantCoefficients) -> ComplexMatrix {
    let d = c.d();
    let mut out = ComplexMatrix::zeros(d * d * d, d * d * d);
    for i in 0..d {
        for j in 0..d {
            let e = ComplexMatrix::from_fn(d, d, |a, b| {
                C64::new(if (a, b) == (i, j) { 1.0 } else { 0.0 }, 0.0)
            });
            out = &out + &kron(&e, &apply(c, &e));
        }
    }
    out
}

/// `tr_1` and `tr_2` on `C^d ⊗ C^d`.
pub fn partial_traces(t: &ComplexMatrix, d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let first =
        ComplexMatrix::from_fn(d, d, |i, j| (0..d).map(|k| t[(k * d + i, k * d + j)]).sum());
    let second =
        ComplexMatrix::from_fn(d, d, |i, j| (0..d).map(|k| t[(i * d + k, j * d + k)]).sum());
    (first, second)
}

pub fn complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| complex(rng))
}

pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let a = random_matrix(d, rng);
    (&a + &a.adjoint()).scale_real(0.5)
}

pub fn random_coefficients<R: Rng>(d: usize, rng: &mut R) -> CovariantCoefficients {
    CovariantCoefficients::new(d, std::array::from_fn(|_| complex(rng))).unwrap()
}

/// Unitary from Gram–Schmidt on a random complex matrix (not Haar, just unitary).
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = to_na(&random_matrix(d, rng)).qr();
    let q = qr.q();
    ComplexMatrix::from_fn(d, d, |i, j| q[(i, j)])
}

pub fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
