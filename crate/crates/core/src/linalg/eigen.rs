//! Cyclic complex Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Every matrix that needs diagonalizing here is at most a few hundred rows,
//! where Jacobi's accuracy on small eigenvalues matters more than its cubic
//! cost per sweep.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and, optionally, the unitary whose columns are the
/// matching eigenvectors. The input is Hermitian-symmetrized first; callers
/// are responsible for checking hermiticity.
pub(crate) fn jacobi(a: &ComplexMatrix, want_vectors: bool) -> (Vec<f64>, Option<ComplexMatrix>) {
    let n = a.rows();
    debug_assert!(a.is_square());

    let mut m = ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));

    let total = m.frobenius_norm();
    if total == 0.0 {
        return finish(&m, v);
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 0.25 * total {
            break;
        }

        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;

                // Real 2x2 rotation for [[app, r], [r, aqq]] after removing the phase.
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // J = diag(.., e^{-iφ} at q, ..) · R; apply A <- J^* A J.
                let back = phase.conj();
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c - mkq * back * s;
                    m[(k, q)] = mkp * s + mkq * back * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c - mqk * phase * s;
                    m[(q, k)] = mpk * s + mqk * phase * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * back * s;
                        v[(k, q)] = vkp * s + vkq * back * c;
                    }
                }
            }
        }
    }

    finish(&m, v)
}

fn finish(m: &ComplexMatrix, v: Option<ComplexMatrix>) -> (Vec<f64>, Option<ComplexMatrix>) {
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    (values, vectors)
}

/// Minimum-norm solution of `G x = b` for Hermitian positive semidefinite `G`
/// (typically a Gram matrix), through its eigendecomposition. Eigenvalues at
/// or below `cutoff * max_eigenvalue` are treated as zero.
pub(crate) struct GramSolve {
    pub x: Vec<C64>,
    pub rank: usize,
    /// Orthonormal basis of the numerical null space of `G`.
    pub null_space: Vec<Vec<C64>>,
}

pub(crate) fn solve_gram(gram: &ComplexMatrix, rhs: &[C64], cutoff: f64) -> GramSolve {
    let n = gram.rows();
    let (values, vectors) = jacobi(gram, true);
    let vectors = vectors.expect("eigenvectors requested");
    let top = values.iter().fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    let threshold = cutoff * top;

    let mut x = vec![ZERO; n];
    let mut rank = 0;
    let mut null_space = Vec::new();
    for (k, &lambda) in values.iter().enumerate() {
        let col = vectors.column(k);
        if lambda > threshold && lambda > 0.0 {
            rank += 1;
            let proj: C64 = col.iter().zip(rhs).map(|(u, b)| u.conj() * b).sum();
            let w = proj / lambda;
            for (xi, ui) in x.iter_mut().zip(&col) {
                *xi += w * ui;
            }
        } else {
            null_space.push(col);
        }
    }
    GramSolve {
        x,
        rank,
        null_space,
    }
}

/// Complex Householder QR of a square matrix. Returns `(Q, diag(R))`.
pub(crate) fn householder_qr(a: &ComplexMatrix) -> (ComplexMatrix, Vec<C64>) {
    let n = a.rows();
    debug_assert!(a.is_square());
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);

    for k in 0..n {
        let norm_x = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == 0.0 {
            ONE
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;

        let mut v: Vec<C64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }

        // R <- (I - 2 v v^*) R on rows k..n.
        for j in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * r[(k + t, j)])
                .sum();
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= *vi * dot * 2.0;
            }
        }
        // Q <- Q (I - 2 v v^*) on columns k..n.
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| q[(i, k + t)] * vi).sum();
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] -= dot * vi.conj() * 2.0;
            }
        }
    }

    let diag = (0..n).map(|i| r[(i, i)]).collect();
    (q, diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_hermitian(n: usize) -> ComplexMatrix {
        let raw = ComplexMatrix::from_fn(n, n, |i, j| {
            C64::new(
                ((i * 7 + j * 3) % 11) as f64 - 5.0,
                ((i * 5 + j * 2) % 7) as f64 - 3.0,
            )
        });
        &raw + &raw.adjoint()
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let a = sample_hermitian(9);
        let (vals, vecs) = jacobi(&a, true);
        let v = vecs.unwrap();
        let d = &(&v.adjoint() * &a) * &v;
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i == j { vals[i] } else { 0.0 };
                assert!(
                    (d[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-11,
                    "{i},{j}"
                );
            }
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn qr_reconstructs() {
        let a = sample_hermitian(5);
        let (q, diag) = householder_qr(&a);
        let qhq = &q.adjoint() * &q;
        assert!(qhq.approx_eq(&ComplexMatrix::identity(5), 1e-13));
        let r = &q.adjoint() * &a;
        for i in 0..5 {
            assert!((r[(i, i)] - diag[i]).norm() < 1e-12);
            for j in 0..i {
                assert!(r[(i, j)].norm() < 1e-12, "R not upper triangular");
            }
        }
    }

    #[test]
    fn gram_solve_min_norm() {
        // Rank-1 Gram matrix [[1,1],[1,1]]; minimum-norm solution of G x = (2,2) is (1,1).
        let g = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let sol = solve_gram(&g, &[C64::new(2.0, 0.0), C64::new(2.0, 0.0)], 1e-12);
        assert_eq!(sol.rank, 1);
        assert_eq!(sol.null_space.len(), 1);
        assert!((sol.x[0] - ONE).norm() < 1e-12 && (sol.x[1] - ONE).norm() < 1e-12);
    }
}
