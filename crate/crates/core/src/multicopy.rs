//! Covariant maps `M_d → M_d^{⊗m}` in the symmetric-group form
//!
//! ```text
//! Φ(X) = Σ_i Σ_j λ_ij · Γ(s_i) · Φ_j(X)
//! ```
//!
//! where `s_1, …, s_{m!}` enumerate permutations lexicographically (see
//! [`Permutation::all`]), `Φ_1(X) = tr(X)·I^{⊗m}` and `Φ_k(X)` places `X` in
//! tensor slot `k − 1` with identities elsewhere.
//!
//! For `m = 2` the enumeration is `(identity, swap)` and the two-copy
//! coefficients correspond as
//!
//! | two-copy | `(permutation, j)` |
//! |----------|--------------------|
//! | `l1` | `(identity, 3)` |
//! | `l2` | `(identity, 2)` |
//! | `l3` | `(swap, 3)` |
//! | `l4` | `(swap, 2)` |
//! | `l5` | `(identity, 1)` |
//! | `l6` | `(swap, 1)` |

use serde::{Deserialize, Serialize};

use crate::covmap2::CovariantCoefficients;
use crate::error::{mismatch, Error, Result};
use crate::linalg::{
    kron_all, operator_norm, solve_gram, superop_apply, superop_from_map, ComplexMatrix, C64, ONE,
    ZERO,
};
use crate::operators::{
    haar_unitary_indexed, permutation_index_map, permutation_operator, tensor_flat, Permutation,
    RngSeed,
};

/// Largest supported number of copies.
pub const MAX_COPIES: usize = 4;
/// Largest supported output dimension `d^m`.
pub const MAX_OUTPUT_DIM: usize = 256;

pub(crate) fn check_limits(m: usize, d: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidDimension(format!(
            "m must be at least 2, got {m}"
        )));
    }
    if m > MAX_COPIES {
        return Err(Error::InvalidDimension(format!(
            "m = {m} exceeds the supported maximum {MAX_COPIES}"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "d must be at least 2, got {d}"
        )));
    }
    match d.checked_pow(m as u32) {
        Some(n) if n <= MAX_OUTPUT_DIM => Ok(()),
        _ => Err(Error::InvalidDimension(format!(
            "d^m = {d}^{m} exceeds the supported maximum {MAX_OUTPUT_DIM}"
        ))),
    }
}

fn factorial(m: usize) -> usize {
    (1..=m).product()
}

/// Coefficients `λ_ij`, stored as `lam[i][j − 1]` for the `i`-th permutation
/// in lexicographic order and slot index `j ∈ 1..=m+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MultiRepr", into = "MultiRepr")]
pub struct MultiCopyCoefficients {
    m: usize,
    d: usize,
    lam: Vec<Vec<C64>>,
}

#[derive(Serialize, Deserialize)]
struct MultiRepr {
    m: usize,
    d: usize,
    lam: Vec<Vec<C64>>,
}

impl TryFrom<MultiRepr> for MultiCopyCoefficients {
    type Error = Error;

    fn try_from(r: MultiRepr) -> Result<Self> {
        MultiCopyCoefficients::new(r.m, r.d, r.lam)
    }
}

impl From<MultiCopyCoefficients> for MultiRepr {
    fn from(c: MultiCopyCoefficients) -> Self {
        MultiRepr {
            m: c.m,
            d: c.d,
            lam: c.lam,
        }
    }
}

impl MultiCopyCoefficients {
    pub fn new(m: usize, d: usize, lam: Vec<Vec<C64>>) -> Result<Self> {
        check_limits(m, d)?;
        if lam.len() != factorial(m) {
            return Err(mismatch(
                "MultiCopyCoefficients rows",
                factorial(m),
                lam.len(),
            ));
        }
        if let Some(row) = lam.iter().find(|row| row.len() != m + 1) {
            return Err(mismatch("MultiCopyCoefficients columns", m + 1, row.len()));
        }
        Ok(MultiCopyCoefficients { m, d, lam })
    }

    pub fn zero(m: usize, d: usize) -> Result<Self> {
        check_limits(m, d)?;
        Self::new(m, d, vec![vec![ZERO; m + 1]; factorial(m)])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lam(&self) -> &[Vec<C64>] {
        &self.lam
    }

    /// `λ_ij` with `i` the 0-based permutation index and `j ∈ 1..=m+1`.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.lam[i][j - 1]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.lam[i][j - 1] = value;
    }

    /// The `m = 2` layout of a two-copy coefficient vector.
    pub fn from_two_copy(c: &CovariantCoefficients) -> Self {
        let [l1, l2, l3, l4, l5, l6] = *c.coeffs();
        MultiCopyCoefficients {
            m: 2,
            d: c.d(),
            lam: vec![vec![l5, l2, l1], vec![l6, l4, l3]],
        }
    }

    /// Inverse of [`from_two_copy`](Self::from_two_copy); requires `m = 2`.
    pub fn to_two_copy(&self) -> Result<CovariantCoefficients> {
        if self.m != 2 {
            return Err(Error::InvalidDimension(format!(
                "only m = 2 maps have a two-copy layout, got m = {}",
                self.m
            )));
        }
        let (id, sw) = (&self.lam[0], &self.lam[1]);
        CovariantCoefficients::new(self.d, [id[2], id[1], sw[2], sw[1], id[0], sw[0]])
    }

    pub fn max_abs_diff(&self, other: &MultiCopyCoefficients) -> f64 {
        if (self.m, self.d) != (other.m, other.d) {
            return f64::INFINITY;
        }
        self.lam
            .iter()
            .flatten()
            .zip(other.lam.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `Φ_j(X)`: `tr(X)·I^{⊗m}` for `j = 1`, otherwise `X` in tensor slot `j − 1`.
pub fn slot_embedding(j: usize, x: &ComplexMatrix, m: usize, d: usize) -> Result<ComplexMatrix> {
    if m == 0 || d == 0 {
        return Err(Error::InvalidDimension("m and d must be positive".into()));
    }
    if j == 0 || j > m + 1 {
        return Err(Error::InvalidDimension(format!(
            "slot index j = {j} outside 1..={}",
            m + 1
        )));
    }
    if x.shape() != (d, d) {
        return Err(mismatch(
            "slot_embedding",
            format!("{d}x{d}"),
            format!("{:?}", x.shape()),
        ));
    }
    let n = d.pow(m as u32);
    if j == 1 {
        return Ok(ComplexMatrix::identity(n).scale(x.trace()));
    }
    let id = ComplexMatrix::identity(d);
    let factors: Vec<&ComplexMatrix> = (1..=m).map(|k| if k == j - 1 { x } else { &id }).collect();
    Ok(kron_all(factors))
}

/// `Φ(X) = Σ λ_ij Γ(s_i) Φ_j(X)`.
pub fn apply_multi(mc: &MultiCopyCoefficients, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (m, d) = (mc.m, mc.d);
    let slots: Vec<ComplexMatrix> = (1..=m + 1)
        .map(|j| slot_embedding(j, x, m, d))
        .collect::<Result<_>>()?;
    let n = d.pow(m as u32);
    let mut out = ComplexMatrix::zeros(n, n);
    for (row, perm) in mc.lam.iter().zip(Permutation::all(m)) {
        if row.iter().all(|&z| z == ZERO) {
            continue;
        }
        let mut inner = ComplexMatrix::zeros(n, n);
        for (lam, slot) in row.iter().zip(&slots) {
            if *lam != ZERO {
                inner.add_scaled(*lam, slot);
            }
        }
        // Γ(s) acting from the left permutes rows
        out.add_scaled(ONE, &inner.permute_rows(&permutation_index_map(&perm, d)));
    }
    Ok(out)
}

/// The `d^{2m} × d²` superoperator matrix of [`apply_multi`].
pub fn realize_multi(mc: &MultiCopyCoefficients) -> ComplexMatrix {
    let n = mc.d.pow(mc.m as u32);
    superop_from_map(mc.d, n, |x| {
        apply_multi(mc, x).expect("shape fixed by construction")
    })
}

fn check_multi_superop(superop: &ComplexMatrix, m: usize, d: usize) -> Result<usize> {
    check_limits(m, d)?;
    let n = d.pow(m as u32);
    if superop.shape() != (n * n, d * d) {
        return Err(mismatch(
            "m-copy superoperator",
            format!("{}x{}", n * n, d * d),
            format!("{:?}", superop.shape()),
        ));
    }
    Ok(n)
}

/// Recovers `λ_ij` from matrix elements of `Φ(e1 e2^*)` and `Φ(e1 e1^*)` on
/// tensors of distinct basis vectors; needs `d ≥ m + 1`. The residual is the
/// operator-norm distance between the input and the realized result.
pub fn extract_multi(
    superop: &ComplexMatrix,
    m: usize,
    d: usize,
) -> Result<(MultiCopyCoefficients, f64)> {
    let n = check_multi_superop(superop, m, d)?;
    if d < m + 1 {
        return Err(Error::UniquenessUnavailable {
            m,
            d,
            needed: m + 1,
        });
    }
    let perms = Permutation::all(m);
    let maps: Vec<Vec<usize>> = perms.iter().map(|p| permutation_index_map(p, d)).collect();
    // ⟨u, Φ(e_a e_b^*) v⟩ for flat tensor indices u, v
    let elem = |a: usize, b: usize, u: usize, v: usize| superop[(u + v * n, a + b * d)];

    let mut mc = MultiCopyCoefficients::zero(m, d)?;

    // Trace slot: v = e2 ⊗ e3 ⊗ … ⊗ e_{m+1} contains no e1, so only Φ_1 survives
    // in Φ(e1 e1^*) v = Σ_i λ_i1 Γ(s_i) v.
    let base: Vec<usize> = (1..=m).collect();
    let v = tensor_flat(&base, d);
    for (i, map) in maps.iter().enumerate() {
        mc.set(i, 1, elem(0, 0, map[v], v));
    }

    // Slot k: e2 in slot k and e3, …, e_{m+1} elsewhere. Only Φ_{k+1}(e1 e2^*)
    // acts nontrivially, turning v into w (e1 in slot k), so
    // Φ(e1 e2^*) v = Σ_i λ_{i,k+1} Γ(s_i) w.
    for k in 0..m {
        let mut digits = Vec::with_capacity(m);
        let mut next = 2;
        for slot in 0..m {
            if slot == k {
                digits.push(1);
            } else {
                digits.push(next);
                next += 1;
            }
        }
        let v = tensor_flat(&digits, d);
        digits[k] = 0;
        let w = tensor_flat(&digits, d);
        for (i, map) in maps.iter().enumerate() {
            mc.set(i, k + 2, elem(0, 1, map[w], v));
        }
    }

    let residual = operator_norm(&(superop - &realize_multi(&mc)));
    Ok((mc, residual))
}

/// Largest `‖Φ(UXU^*) − U^{⊗m} Φ(X) (U^*)^{⊗m}‖` (operator norm) over
/// `samples` Haar unitaries and all matrix units `X`.
pub fn covariance_residual_multi(
    superop: &ComplexMatrix,
    m: usize,
    d: usize,
    samples: usize,
    seed: RngSeed,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let n = check_multi_superop(superop, m, d)?;
    let mut images = Vec::with_capacity(d * d);
    let mut units = Vec::with_capacity(d * d);
    for b in 0..d {
        for a in 0..d {
            let mut x = ComplexMatrix::zeros(d, d);
            x[(a, b)] = ONE;
            images.push(ComplexMatrix::from_vec_columns(
                n,
                n,
                &superop.column(a + b * d),
            )?);
            units.push(x);
        }
    }
    let mut worst = 0.0_f64;
    for k in 0..samples {
        let u = haar_unitary_indexed(d, seed, k as u64)?;
        let um = kron_all(std::iter::repeat_n(&u, m));
        for (x, image) in units.iter().zip(&images) {
            let lhs = superop_apply(superop, &u.conjugate_by(x))?;
            let rhs = um.conjugate_by(image);
            worst = worst.max(operator_norm(&(&lhs - &rhs)));
        }
    }
    Ok(worst)
}

/// Least-squares expansion of an operator in the permutation operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurWeylFit {
    pub m: usize,
    pub d: usize,
    /// Coefficient of `Γ(s_i)`, lexicographic order.
    pub coefficients: Vec<C64>,
    /// Frobenius norm of `t − Σ c_i Γ(s_i)`.
    pub residual: f64,
    /// True when the permutation operators are linearly dependent (`d < m`);
    /// the minimum-norm coefficients are reported then.
    pub degenerate: bool,
}

/// Projects `t` onto `span{Γ(s) : s ∈ S_m}` in the Hilbert–Schmidt inner product.
pub fn schur_weyl_fit(t: &ComplexMatrix, m: usize, d: usize) -> Result<SchurWeylFit> {
    check_limits(m, d)?;
    let n = d.pow(m as u32);
    if t.shape() != (n, n) {
        return Err(mismatch(
            "schur_weyl_fit",
            format!("{n}x{n}"),
            format!("{:?}", t.shape()),
        ));
    }
    let gammas: Vec<ComplexMatrix> = Permutation::all(m)
        .iter()
        .map(|p| permutation_operator(p, d))
        .collect::<Result<_>>()?;
    let inner = |a: &ComplexMatrix, b: &ComplexMatrix| -> C64 {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.conj() * y)
            .sum()
    };
    let k = gammas.len();
    let gram = ComplexMatrix::from_fn(k, k, |s, u| inner(&gammas[s], &gammas[u]));
    let rhs: Vec<C64> = gammas.iter().map(|g| inner(g, t)).collect();
    let sol = solve_gram(&gram, &rhs, 1e-12);
    let mut rem = t.clone();
    for (c, g) in sol.x.iter().zip(&gammas) {
        rem.add_scaled(-c, g);
    }
    Ok(SchurWeylFit {
        m,
        d,
        coefficients: sol.x,
        residual: rem.frobenius_norm(),
        degenerate: sol.rank < k,
    })
}
