//! Two-copy covariant maps `Φ : M_d → M_d ⊗ M_d` in the six-coefficient form
//!
//! ```text
//! Φ(X) = l1·I⊗X + l2·X⊗I + l3·S(I⊗X) + l4·S(X⊗I) + l5·tr(X)·I⊗I + l6·tr(X)·S
//! ```
//!
//! At `d = 2` the six basis maps are linearly dependent:
//! `I⊗X + X⊗I − S(I⊗X) − S(X⊗I) − tr(X)·I⊗I + tr(X)·S = 0`, so coefficients are
//! only defined up to multiples of [`GAUGE_VECTOR`]. [`gauge_reduce`] picks the
//! representative orthogonal to it.

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::{
    kron, operator_norm, solve_gram, superop_dims, superop_from_map, ComplexMatrix, Tolerance, C64,
    ONE, ZERO,
};
use crate::operators::swap_operator;

/// Direction in coefficient space that realizes the zero map at `d = 2`.
pub const GAUGE_VECTOR: [f64; 6] = [1.0, 1.0, -1.0, -1.0, -1.0, 1.0];

/// The coefficients `(l1, …, l6)` of a two-copy covariant map on `M_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoefficientsRepr", into = "CoefficientsRepr")]
pub struct CovariantCoefficients {
    d: usize,
    coeffs: [C64; 6],
}

#[derive(Serialize, Deserialize)]
struct CoefficientsRepr {
    d: usize,
    coeffs: Vec<C64>,
}

impl TryFrom<CoefficientsRepr> for CovariantCoefficients {
    type Error = Error;

    fn try_from(repr: CoefficientsRepr) -> Result<Self> {
        let coeffs: [C64; 6] = repr
            .coeffs
            .as_slice()
            .try_into()
            .map_err(|_| mismatch("CovariantCoefficients", 6, repr.coeffs.len()))?;
        CovariantCoefficients::new(repr.d, coeffs)
    }
}

impl From<CovariantCoefficients> for CoefficientsRepr {
    fn from(c: CovariantCoefficients) -> Self {
        CoefficientsRepr {
            d: c.d,
            coeffs: c.coeffs.to_vec(),
        }
    }
}

impl CovariantCoefficients {
    pub fn new(d: usize, coeffs: [C64; 6]) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(format!(
                "d must be at least 2, got {d}"
            )));
        }
        Ok(CovariantCoefficients { d, coeffs })
    }

    pub fn from_real(d: usize, coeffs: [f64; 6]) -> Result<Self> {
        Self::new(d, coeffs.map(|x| C64::new(x, 0.0)))
    }

    /// The trace-free family `(l1, l2, l3, l4, 0, 0)`.
    pub fn trace_free(d: usize, l: [C64; 4]) -> Result<Self> {
        Self::new(d, [l[0], l[1], l[2], l[3], ZERO, ZERO])
    }

    pub fn zero(d: usize) -> Result<Self> {
        Self::new(d, [ZERO; 6])
    }

    /// `X ↦ ½[S(I⊗X) + S(X⊗I)]`.
    pub fn virtual_broadcaster(d: usize) -> Result<Self> {
        Self::from_real(d, [0.0, 0.0, 0.5, 0.5, 0.0, 0.0])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[C64; 6] {
        &self.coeffs
    }

    /// `l_k` for `k` in `1..=6`.
    pub fn l(&self, k: usize) -> C64 {
        self.coeffs[k - 1]
    }

    pub fn has_trace_terms(&self, tol: Tolerance) -> bool {
        let scale = self.max_abs();
        !(tol.is_small(self.coeffs[4].norm(), scale) && tol.is_small(self.coeffs[5].norm(), scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Coefficientwise `a·self + b·other`.
    pub fn combine(&self, a: C64, other: &CovariantCoefficients, b: C64) -> Result<Self> {
        if self.d != other.d {
            return Err(mismatch("combine", self.d, other.d));
        }
        let mut out = self.coeffs;
        for (o, y) in out.iter_mut().zip(other.coeffs) {
            *o = a * *o + b * y;
        }
        Self::new(self.d, out)
    }
}

fn check_input(c: &CovariantCoefficients, x: &ComplexMatrix) -> Result<()> {
    if x.shape() != (c.d, c.d) {
        return Err(mismatch(
            "apply",
            format!("{0}x{0}", c.d),
            format!("{:?}", x.shape()),
        ));
    }
    Ok(())
}

/// Applies `S` from the left by permuting rows `(i, j) → (j, i)`.
fn swap_left(m: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let perm: Vec<usize> = (0..d * d).map(|k| (k % d) * d + k / d).collect();
    m.permute_rows(&perm)
}

/// `Φ(X)` for the map with coefficients `c`.
pub fn apply(c: &CovariantCoefficients, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_input(c, x)?;
    let d = c.d;
    let [l1, l2, l3, l4, l5, l6] = c.coeffs;
    let id = ComplexMatrix::identity(d);
    let i_x = kron(&id, x);
    let x_i = kron(x, &id);
    let tr = x.trace();

    let mut out = i_x.scale(l1);
    out.add_scaled(l2, &x_i);
    out.add_scaled(l3, &swap_left(&i_x, d));
    out.add_scaled(l4, &swap_left(&x_i, d));
    out.add_scaled(l5 * tr, &ComplexMatrix::identity(d * d));
    out.add_scaled(l6 * tr, &swap_operator(d)?);
    Ok(out)
}

/// The `d⁴ × d²` matrix `M` with `M·vec(X) = vec(Φ(X))` (column-major `vec`).
pub fn realize_superoperator(c: &CovariantCoefficients) -> ComplexMatrix {
    superop_from_map(c.d, c.d * c.d, |x| {
        apply(c, x).expect("shape fixed by construction")
    })
}

/// Choi matrix `Σ_ij e_i e_j^* ⊗ Φ(e_i e_j^*)`.
pub fn choi(c: &CovariantCoefficients) -> ComplexMatrix {
    let d = c.d;
    let n = d * d;
    let mut out = ComplexMatrix::zeros(d * n, d * n);
    let mut unit = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            unit[(i, j)] = C64::new(1.0, 0.0);
            let image = apply(c, &unit).expect("shape fixed by construction");
            for r in 0..n {
                for s in 0..n {
                    out[(i * n + r, j * n + s)] = image[(r, s)];
                }
            }
            unit[(i, j)] = ZERO;
        }
    }
    out
}

fn check_superop(superop: &ComplexMatrix, d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "d must be at least 2, got {d}"
        )));
    }
    let expected = (d.pow(4), d * d);
    if superop.shape() != expected {
        return Err(mismatch(
            "superoperator",
            format!("{expected:?}"),
            format!("{:?}", superop.shape()),
        ));
    }
    Ok(())
}

/// Reads off the coefficients of a covariant map from a few matrix elements
/// and reports how far the input is from the realized result (operator norm).
/// Requires `d ≥ 3`; a non-covariant input shows up as a large residual.
pub fn extract(superop: &ComplexMatrix, d: usize) -> Result<(CovariantCoefficients, f64)> {
    check_superop(superop, d)?;
    if d == 2 {
        return Err(Error::GaugeAmbiguous);
    }
    let n = d * d;
    let (e1, e2, e3) = (0, 1, 2);
    let t = |a: usize, b: usize| a * d + b;
    // ⟨u, Φ(e_a e_b^*) v⟩ for basis tensors u, v.
    let elem = |a: usize, b: usize, u: usize, v: usize| superop[(u + v * n, a + b * d)];

    let l1 = elem(e1, e2, t(e3, e1), t(e3, e2));
    let l2 = elem(e1, e2, t(e1, e3), t(e2, e3));
    let l3 = elem(e1, e2, t(e1, e3), t(e3, e2));
    let l4 = elem(e1, e2, t(e3, e1), t(e2, e3));
    let l5 = elem(e1, e1, t(e2, e3), t(e2, e3));
    let l6 = elem(e1, e1, t(e3, e2), t(e2, e3));

    let c = CovariantCoefficients::new(d, [l1, l2, l3, l4, l5, l6])?;
    let residual = operator_norm(&(superop - &realize_superoperator(&c)));
    Ok((c, residual))
}

/// Least-squares fit of a superoperator by the six basis maps, in
/// Frobenius norm; the minimum-norm solution is returned, which at `d = 2`
/// is the gauge-reduced representative. The residual is the operator norm of
/// the difference, as in [`extract`].
pub fn fit(superop: &ComplexMatrix, d: usize) -> Result<(CovariantCoefficients, f64)> {
    check_superop(superop, d)?;
    let basis: Vec<ComplexMatrix> = (0..6)
        .map(|k| {
            let mut unit = [ZERO; 6];
            unit[k] = C64::new(1.0, 0.0);
            realize_superoperator(&CovariantCoefficients::new(d, unit).expect("d checked"))
        })
        .collect();
    let inner = |a: &ComplexMatrix, b: &ComplexMatrix| -> C64 {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.conj() * y)
            .sum()
    };
    let gram = ComplexMatrix::from_fn(6, 6, |k, l| inner(&basis[k], &basis[l]));
    let rhs: Vec<C64> = basis.iter().map(|b| inner(b, superop)).collect();
    let sol = solve_gram(&gram, &rhs, 1e-12);
    let coeffs: [C64; 6] = sol.x.try_into().expect("six unknowns");
    let c = gauge_reduce(&CovariantCoefficients::new(d, coeffs)?);
    let residual = operator_norm(&(superop - &realize_superoperator(&c)));
    Ok((c, residual))
}

/// Extraction at `d ≥ 3`, gauge-reduced least squares at `d = 2`.
pub fn extract_or_fit(superop: &ComplexMatrix) -> Result<(CovariantCoefficients, f64)> {
    let (d_in, d_out) = superop_dims(superop)?;
    if d_out != d_in * d_in {
        return Err(mismatch(
            "superoperator",
            format!("{} output rows", d_in.pow(4)),
            superop.rows(),
        ));
    }
    if d_in == 2 {
        fit(superop, d_in)
    } else {
        extract(superop, d_in)
    }
}

/// Canonical representative: unchanged for `d ≥ 3`; at `d = 2` the
/// component along [`GAUGE_VECTOR`] is removed.
pub fn gauge_reduce(c: &CovariantCoefficients) -> CovariantCoefficients {
    if c.d != 2 {
        return *c;
    }
    let overlap: C64 = c
        .coeffs
        .iter()
        .zip(GAUGE_VECTOR)
        .map(|(z, g)| z * g)
        .sum::<C64>()
        / 6.0;
    let mut out = c.coeffs;
    for (o, g) in out.iter_mut().zip(GAUGE_VECTOR) {
        *o -= overlap * g;
    }
    CovariantCoefficients { d: 2, coeffs: out }
}

/// Whether two coefficient vectors realize the same map.
pub fn maps_equal(
    c1: &CovariantCoefficients,
    c2: &CovariantCoefficients,
    tol: Tolerance,
) -> Result<bool> {
    if c1.d != c2.d {
        return Err(mismatch("maps_equal", c1.d, c2.d));
    }
    let (a, b) = (gauge_reduce(c1), gauge_reduce(c2));
    Ok(a.coeffs
        .iter()
        .zip(&b.coeffs)
        .all(|(x, y)| tol.close(*x, *y)))
}

/// At `d = 2` a map with `l5 = −l6` has a gauge-equivalent trace-free
/// representative; elsewhere trace terms are intrinsic.
pub fn trace_free_representative(
    c: &CovariantCoefficients,
    tol: Tolerance,
) -> Option<CovariantCoefficients> {
    if !c.has_trace_terms(tol) {
        return Some(*c);
    }
    if c.d() == 2 {
        let shift = c.l(5);
        let g = CovariantCoefficients::from_real(2, GAUGE_VECTOR).expect("d = 2");
        let shifted = c.combine(ONE, &g, shift).expect("same d");
        if !shifted.has_trace_terms(tol) {
            return Some(shifted);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::superop_apply;
    use crate::operators::matrix_unit;

    fn c(d: usize, v: [f64; 6]) -> CovariantCoefficients {
        CovariantCoefficients::from_real(d, v).unwrap()
    }

    #[test]
    fn apply_virtual_broadcaster_on_e11() {
        let out = apply(
            &c(2, [0.0, 0.0, 0.5, 0.5, 0.0, 0.0]),
            &matrix_unit(1, 1, 2).unwrap(),
        )
        .unwrap();
        let mut want = ComplexMatrix::zeros(4, 4);
        want[(0, 0)] = ONE;
        want[(1, 2)] = C64::new(0.5, 0.0);
        want[(2, 1)] = C64::new(0.5, 0.0);
        assert!(out.approx_eq(&want, 1e-15));
    }

    #[test]
    fn apply_trace_term() {
        let x = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64));
        let out = apply(&c(3, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0]), &x).unwrap();
        assert_eq!(out, ComplexMatrix::identity(9).scale(x.trace()));
    }

    #[test]
    fn apply_on_e11_block_form() {
        // Real μ with μ3 = μ4 at d = 2: Φ(e1e1*) in the basis (e1e1, e1e2, e2e1, e2e2)
        // is diag(Σμ, [[μ2+μ5, μ3+μ6], [μ3+μ6, μ1+μ5]], μ5+μ6); swapping the
        // middle two basis vectors gives the block with μ1+μ5 first.
        let mu = [0.3, -0.7, 0.4, 0.4, 1.1, -0.2];
        let out = apply(&c(2, mu), &matrix_unit(1, 1, 2).unwrap()).unwrap();
        let s: f64 = mu.iter().sum();
        let mut want = ComplexMatrix::zeros(4, 4);
        want[(0, 0)] = C64::new(s, 0.0);
        want[(1, 1)] = C64::new(mu[1] + mu[4], 0.0);
        want[(1, 2)] = C64::new(mu[2] + mu[5], 0.0);
        want[(2, 1)] = C64::new(mu[2] + mu[5], 0.0);
        want[(2, 2)] = C64::new(mu[0] + mu[4], 0.0);
        want[(3, 3)] = C64::new(mu[4] + mu[5], 0.0);
        assert!(out.approx_eq(&want, 1e-14), "{out:?}");
    }

    #[test]
    fn apply_rejects_wrong_shape() {
        assert!(apply(&c(3, [1.0; 6]), &ComplexMatrix::identity(2)).is_err());
        assert!(CovariantCoefficients::from_real(1, [0.0; 6]).is_err());
    }

    #[test]
    fn superoperator_matches_apply() {
        let cc = CovariantCoefficients::new(
            3,
            [
                C64::new(0.1, 0.2),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 0.5),
                C64::new(2.0, -1.0),
                C64::new(0.3, 0.0),
                C64::new(-0.4, 0.1),
            ],
        )
        .unwrap();
        let m = realize_superoperator(&cc);
        assert_eq!(m.shape(), (81, 9));
        let x = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, 1.0 - i as f64));
        assert!(superop_apply(&m, &x)
            .unwrap()
            .approx_eq(&apply(&cc, &x).unwrap(), 1e-12));
        assert_eq!(
            realize_superoperator(&CovariantCoefficients::zero(2).unwrap()).max_abs(),
            0.0
        );
    }

    #[test]
    fn extract_virtual_broadcaster() {
        let vb = CovariantCoefficients::virtual_broadcaster(3).unwrap();
        let (got, residual) = extract(&realize_superoperator(&vb), 3).unwrap();
        assert_eq!(got, vb);
        assert!(residual < 1e-12);
        let vb2 = CovariantCoefficients::virtual_broadcaster(2).unwrap();
        assert_eq!(
            extract(&realize_superoperator(&vb2), 2),
            Err(Error::GaugeAmbiguous)
        );
    }

    #[test]
    fn gauge_examples() {
        let g = c(2, GAUGE_VECTOR);
        assert!(gauge_reduce(&g).max_abs() < 1e-15);
        let c3 = c(3, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(gauge_reduce(&c3), c3);
        let tol = Tolerance::default();
        assert!(maps_equal(
            &c(2, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            &c(2, [0.0, -1.0, 1.0, 1.0, 1.0, -1.0]),
            tol
        )
        .unwrap());
        assert!(!maps_equal(
            &c(3, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            &c(3, [0.0, -1.0, 1.0, 1.0, 1.0, -1.0]),
            tol
        )
        .unwrap());
        assert!(maps_equal(&c3, &c(2, [0.0; 6]), tol).is_err());
    }

    #[test]
    fn coefficients_json() {
        let vb = CovariantCoefficients::virtual_broadcaster(3).unwrap();
        let s = serde_json::to_string(&vb).unwrap();
        assert_eq!(
            s,
            r#"{"d":3,"coeffs":[[0.0,0.0],[0.0,0.0],[0.5,0.0],[0.5,0.0],[0.0,0.0],[0.0,0.0]]}"#
        );
        assert_eq!(
            serde_json::from_str::<CovariantCoefficients>(&s).unwrap(),
            vb
        );
        assert!(serde_json::from_str::<CovariantCoefficients>(
            r#"{"d":1,"coeffs":[[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}"#
        )
        .is_err());
        assert!(
            serde_json::from_str::<CovariantCoefficients>(r#"{"d":3,"coeffs":[[0,0]]}"#).is_err()
        );
    }
}
