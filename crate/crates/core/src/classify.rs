//! Closed-form structural classification of two-copy covariant maps.
//!
//! Every verdict comes with the numbers that decided it, so reports can be
//! audited without rerunning anything.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::covmap2::{self, gauge_reduce, maps_equal, CovariantCoefficients};
use crate::error::{mismatch, Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, is_psd, kron, solve_gram, superop_from_map, ComplexMatrix, Tolerance,
    C64, ONE, ZERO,
};
use crate::operators::swap_operator;

pub type Witness = BTreeMap<String, f64>;

/// A verdict together with its numeric evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict<T> {
    pub verdict: T,
    pub witness: Witness,
}

impl<T> Verdict<T> {
    fn new(verdict: T, witness: impl IntoIterator<Item = (&'static str, f64)>) -> Self {
        Verdict {
            verdict,
            witness: witness
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

/// Complete positivity verdict. The closed-form criterion only covers maps
/// without trace terms; everything else is decided by the Choi eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CpVerdict {
    Yes,
    No,
    NumericalOnly { cp: bool },
}

impl CpVerdict {
    pub fn is_cp(self) -> bool {
        matches!(self, CpVerdict::Yes | CpVerdict::NumericalOnly { cp: true })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub d: usize,
    pub coefficients: CovariantCoefficients,
    pub self_adjoint: Verdict<bool>,
    pub positive: Verdict<bool>,
    pub completely_positive: Verdict<CpVerdict>,
    pub broadcasting: Verdict<bool>,
    pub permutation_invariant: Verdict<bool>,
    pub classically_consistent: Verdict<bool>,
    pub virtual_broadcaster: Verdict<bool>,
    /// Present when the report was produced from a dense superoperator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraction_residual: Option<f64>,
}

fn scale_of(c: &CovariantCoefficients) -> f64 {
    c.max_abs().max(1.0)
}

/// Largest `‖Φ(H) − Φ(H)^*‖` over the Hermitian spanning set
/// `{E_ii, E_ij + E_ji, i(E_ij − E_ji)}`.
fn hermiticity_defect_realized(c: &CovariantCoefficients) -> f64 {
    let d = c.d();
    let mut worst = 0.0_f64;
    let mut check = |h: &ComplexMatrix| {
        let y = covmap2::apply(c, h).expect("shape fixed by construction");
        worst = worst.max((&y - &y.adjoint()).max_abs());
    };
    for i in 0..d {
        for j in i..d {
            let mut h = ComplexMatrix::zeros(d, d);
            if i == j {
                h[(i, i)] = ONE;
                check(&h);
                continue;
            }
            h[(i, j)] = ONE;
            h[(j, i)] = ONE;
            check(&h);
            h[(i, j)] = C64::i();
            h[(j, i)] = -C64::i();
            check(&h);
        }
    }
    worst
}

fn coefficient_hermiticity_defect(c: &CovariantCoefficients) -> f64 {
    let [l1, l2, l3, l4, l5, l6] = *c.coeffs();
    [
        l1.im.abs(),
        l2.im.abs(),
        l5.im.abs(),
        l6.im.abs(),
        (l3 - l4.conj()).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

pub fn self_adjoint_verdict(c: &CovariantCoefficients, tol: Tolerance) -> Verdict<bool> {
    let reduced = gauge_reduce(c);
    let defect = coefficient_hermiticity_defect(&reduced);
    let bound = tol.bound(scale_of(c));
    if c.d() == 2 {
        let realized = hermiticity_defect_realized(c);
        let ok = defect <= bound || realized <= bound;
        return Verdict::new(
            ok,
            [
                ("coefficient_defect", defect),
                ("realized_defect", realized),
            ],
        );
    }
    Verdict::new(defect <= bound, [("coefficient_defect", defect)])
}

/// Whether `Φ(X^*) = Φ(X)^*` for all `X`.
pub fn is_self_adjoint(c: &CovariantCoefficients, tol: Tolerance) -> bool {
    self_adjoint_verdict(c, tol).verdict
}

pub fn positive_verdict(c: &CovariantCoefficients, tol: Tolerance) -> Verdict<bool> {
    let sa = self_adjoint_verdict(c, tol);
    if !sa.verdict {
        let defect = sa.witness["coefficient_defect"];
        return Verdict::new(false, [("not_self_adjoint", defect)]);
    }
    let mu = gauge_reduce(c);
    let [m1, m2, m3, m4, m5, m6] = *mu.coeffs();
    let (m1, m2, m5, m6) = (m1.re, m2.re, m5.re, m6.re);
    let bound = tol.bound(scale_of(c));

    let sum = m1 + m2 + 2.0 * (0.5 * (m3 + m4.conj())).re + m5 + m6;
    let off = 0.5 * (m3 + m4.conj()) + m6;
    let block = ComplexMatrix::new(
        2,
        2,
        vec![
            C64::new(m1 + m5, 0.0),
            off.conj(),
            off,
            C64::new(m2 + m5, 0.0),
        ],
    )
    .expect("2x2");
    let block_min = hermitian_eigenvalues(&block, Tolerance::default())
        .map(|v| v[0])
        .unwrap_or(f64::NEG_INFINITY);
    let (name, margin) = if c.d() == 2 {
        ("mu5_plus_mu6", m5 + m6)
    } else {
        ("mu5_minus_abs_mu6", m5 - m6.abs())
    };
    let ok = sum >= -bound && block_min >= -bound && margin >= -bound;
    Verdict::new(
        ok,
        [
            ("sum_mu", sum),
            ("block_min_eigenvalue", block_min),
            (name, margin),
        ],
    )
}

/// Positivity via the closed-form coefficient criterion.
pub fn is_positive(c: &CovariantCoefficients, tol: Tolerance) -> bool {
    positive_verdict(c, tol).verdict
}

pub fn cp_verdict(c: &CovariantCoefficients, tol: Tolerance) -> Verdict<CpVerdict> {
    if let Some(t) = covmap2::trace_free_representative(c, tol) {
        let [l1, l2, l3, l4, _, _] = *t.coeffs();
        let bound = tol.bound(scale_of(&t));
        let sq_bound = tol.bound(scale_of(&t).powi(2));
        let conj_defect = (l4 - l3.conj()).norm();
        let imag = l1.im.abs().max(l2.im.abs());
        let det = l1.re * l2.re - l3.norm_sqr();
        let ok = l1.re >= -bound
            && l2.re >= -bound
            && imag <= bound
            && conj_defect <= bound
            && det >= -sq_bound;
        let v = if ok { CpVerdict::Yes } else { CpVerdict::No };
        return Verdict::new(
            v,
            [
                ("lambda1", l1.re),
                ("lambda2", l2.re),
                ("imaginary_part", imag),
                ("conjugacy_defect", conj_defect),
                ("det_margin", det),
            ],
        );
    }
    let choi = covmap2::choi(c);
    let cp = is_psd(&choi, tol);
    let witness = match hermitian_eigenvalues(&choi, tol) {
        Ok(v) => vec![("choi_min_eigenvalue", v[0])],
        // a non-Hermitian Choi matrix is never PSD; report how far off it is
        Err(Error::NotHermitian { deviation, .. }) => vec![("choi_hermiticity_defect", deviation)],
        Err(_) => vec![],
    };
    Verdict::new(CpVerdict::NumericalOnly { cp }, witness)
}

/// Complete positivity: closed form without trace terms, Choi eigenvalues otherwise.
pub fn is_cp(c: &CovariantCoefficients, tol: Tolerance) -> CpVerdict {
    cp_verdict(c, tol).verdict
}

pub fn broadcast_verdict(c: &CovariantCoefficients, tol: Tolerance) -> Verdict<bool> {
    let [l1, l2, l3, l4, l5, l6] = *c.coeffs();
    let n = c.d() as f64;
    let r1 = (l1 - l2).norm();
    let r2 = (l1 * n + l3 + l4 - 1.0).norm();
    let r3 = (l5 * n + l2 + l6).norm();
    let bound = tol.bound(scale_of(c) * n);
    Verdict::new(
        r1 <= bound && r2 <= bound && r3 <= bound,
        [
            ("l1_minus_l2", r1),
            ("marginal_constraint", r2),
            ("trace_constraint", r3),
        ],
    )
}

/// Whether `tr₁Φ(X) = tr₂Φ(X) = X` for all `X`.
pub fn satisfies_broadcast(c: &CovariantCoefficients, tol: Tolerance) -> bool {
    broadcast_verdict(c, tol).verdict
}

pub fn permutation_invariant_verdict(c: &CovariantCoefficients, tol: Tolerance) -> Verdict<bool> {
    let r = gauge_reduce(c);
    let a = (r.l(1) - r.l(2)).norm();
    let b = (r.l(3) - r.l(4)).norm();
    let bound = tol.bound(scale_of(c));
    Verdict::new(
        a <= bound && b <= bound,
        [("l1_minus_l2", a), ("l3_minus_l4", b)],
    )
}

/// Whether `S Φ(X) S = Φ(X)` for all `X`.
pub fn is_permutation_invariant(c: &CovariantCoefficients, tol: Tolerance) -> bool {
    permutation_invariant_verdict(c, tol).verdict
}

fn check_basis(basis: &ComplexMatrix, d: usize) -> Result<()> {
    if basis.shape() != (d, d) {
        return Err(mismatch(
            "basis",
            format!("{d}x{d} unitary"),
            format!("{:?}", basis.shape()),
        ));
    }
    let defect = (&(&basis.adjoint() * basis) - &ComplexMatrix::identity(d)).max_abs();
    if defect > 1e-10 {
        return Err(Error::InvalidDimension(format!(
            "basis columns are not orthonormal (defect {defect:e})"
        )));
    }
    Ok(())
}

/// Largest entry of `(D⊗D)∘Φ∘D(X) − B_cl(X)` over the matrix units `w_a w_b^*`
/// of the basis whose vectors are the columns of `basis`.
fn classical_deviation(c: &CovariantCoefficients, basis: &ComplexMatrix) -> f64 {
    let d = c.d();
    let wk = kron(basis, basis);
    let wk_adj = wk.adjoint();
    let mut worst = 0.0_f64;
    // D kills off-diagonal units, where B_cl vanishes too; only w_a w_a^* contribute.
    for a in 0..d {
        let wa = basis.column(a);
        let x = ComplexMatrix::from_fn(d, d, |i, j| wa[i] * wa[j].conj());
        let y = covmap2::apply(c, &x).expect("shape fixed by construction");
        let y = &(&wk_adj * &y) * &wk;
        for k in 0..d * d {
            let target = if k == a * d + a { ONE } else { ZERO };
            worst = worst.max((y[(k, k)] - target).norm());
        }
    }
    worst
}

pub fn classically_consistent_verdict(
    c: &CovariantCoefficients,
    basis: Option<&ComplexMatrix>,
    tol: Tolerance,
) -> Result<Verdict<bool>> {
    let standard;
    let basis = match basis {
        Some(b) => {
            check_basis(b, c.d())?;
            b
        }
        None => {
            standard = ComplexMatrix::identity(c.d());
            &standard
        }
    };
    let dev = classical_deviation(c, basis);
    Ok(Verdict::new(
        dev <= tol.bound(scale_of(c)),
        [("max_deviation", dev)],
    ))
}

/// Whether `(D⊗D)∘Φ∘D` equals classical broadcasting in the given orthonormal
/// basis (columns of `basis`; the standard basis when `None`).
pub fn is_classically_consistent(
    c: &CovariantCoefficients,
    basis: Option<&ComplexMatrix>,
    tol: Tolerance,
) -> Result<bool> {
    Ok(classically_consistent_verdict(c, basis, tol)?.verdict)
}

pub fn virtual_broadcaster_verdict(c: &CovariantCoefficients, tol: Tolerance) -> Verdict<bool> {
    let vb = CovariantCoefficients::virtual_broadcaster(c.d()).expect("d validated");
    let (a, b) = (gauge_reduce(c), gauge_reduce(&vb));
    let dist = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let equal = maps_equal(c, &vb, tol).expect("same d");
    Verdict::new(equal, [("distance", dist)])
}

/// Whether `c` realizes `X ↦ ½[S(I⊗X) + S(X⊗I)]`.
pub fn is_virtual_broadcaster(c: &CovariantCoefficients, tol: Tolerance) -> bool {
    virtual_broadcaster_verdict(c, tol).verdict
}

/// Every verdict for one map.
pub fn classify(c: &CovariantCoefficients, tol: Tolerance) -> ClassificationReport {
    ClassificationReport {
        d: c.d(),
        coefficients: *c,
        self_adjoint: self_adjoint_verdict(c, tol),
        positive: positive_verdict(c, tol),
        completely_positive: cp_verdict(c, tol),
        broadcasting: broadcast_verdict(c, tol),
        permutation_invariant: permutation_invariant_verdict(c, tol),
        classically_consistent: classically_consistent_verdict(c, None, tol)
            .expect("standard basis is orthonormal"),
        virtual_broadcaster: virtual_broadcaster_verdict(c, tol),
        extraction_residual: None,
    }
}

/// Classifies a dense superoperator: coefficients are extracted (`d ≥ 3`) or
/// fitted (`d = 2`) first and the residual is recorded in the report.
pub fn classify_superoperator(
    superop: &ComplexMatrix,
    tol: Tolerance,
) -> Result<ClassificationReport> {
    let (c, residual) = covmap2::extract_or_fit(superop)?;
    let mut report = classify(&c, tol);
    report.extraction_residual = Some(residual);
    Ok(report)
}

/// Classical broadcasting in the standard basis,
/// `X ↦ Σ_i ⟨X e_i, e_i⟩ e_i e_i^* ⊗ e_i e_i^*`.
pub fn classical_broadcast(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !x.is_square() {
        return Err(mismatch(
            "classical_broadcast",
            "square matrix",
            format!("{:?}", x.shape()),
        ));
    }
    let d = x.rows();
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        out[(i * d + i, i * d + i)] = x[(i, i)];
    }
    Ok(out)
}

/// Superoperator matrix of [`classical_broadcast`] on `M_d`; not covariant.
pub fn classical_broadcast_superoperator(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "d must be at least 2, got {d}"
        )));
    }
    Ok(superop_from_map(d, d * d, |x| {
        classical_broadcast(x).expect("square by construction")
    }))
}

/// Projection of an operator on `C^d ⊗ C^d` onto `span{I⊗I, S}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutantFit {
    pub alpha: C64,
    pub beta: C64,
    /// Frobenius norm of `t − αI⊗I − βS`.
    pub residual: f64,
}

pub fn commutant_fit(t: &ComplexMatrix, d: usize) -> Result<CommutantFit> {
    let s = swap_operator(d)?;
    let n = d * d;
    if t.shape() != (n, n) {
        return Err(mismatch(
            "commutant_fit",
            format!("{n}x{n}"),
            format!("{:?}", t.shape()),
        ));
    }
    // Gram system [[d², d], [d, d²]] (α, β) = (tr t, tr(S t)).
    let (g11, g12) = ((d * d) as f64, d as f64);
    let r1 = t.trace();
    let r2 = (&s * t).trace();
    let det = g11 * g11 - g12 * g12;
    let alpha = (r1 * g11 - r2 * g12) / det;
    let beta = (r2 * g11 - r1 * g12) / det;
    let mut rem = t.clone();
    rem.add_scaled(-alpha, &ComplexMatrix::identity(n));
    rem.add_scaled(-beta, &s);
    Ok(CommutantFit {
        alpha,
        beta,
        residual: rem.frobenius_norm(),
    })
}

/// Solution set of the linear conditions "permutation invariant and
/// classically consistent" imposed on realized maps: a particular
/// (minimum-norm) coefficient vector plus a basis of undetermined directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSolution {
    pub coefficients: CovariantCoefficients,
    pub free_directions: Vec<[C64; 6]>,
    /// Largest violation of the imposed equations by `coefficients`.
    pub residual: f64,
}

/// Solves for all coefficient vectors whose realized map satisfies
/// `SΦ(X)S = Φ(X)` and `(D⊗D)∘Φ∘D = B_cl` (standard basis) on every matrix unit.
/// The equations are built from the realized basis maps, not from the
/// coefficient criteria, so the result is an independent derivation.
pub fn solve_symmetric_classical_constraints(d: usize) -> Result<ConstraintSolution> {
    let s = swap_operator(d)?;
    let n = d * d;
    let basis: Vec<CovariantCoefficients> = (0..6)
        .map(|k| {
            let mut v = [ZERO; 6];
            v[k] = ONE;
            CovariantCoefficients::new(d, v)
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<[C64; 6]> = Vec::new();
    let mut rhs: Vec<C64> = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let mut x = ComplexMatrix::zeros(d, d);
            x[(a, b)] = ONE;
            let images: Vec<ComplexMatrix> = basis
                .iter()
                .map(|c| covmap2::apply(c, &x).expect("shape fixed"))
                .collect();
            // S Φ(X) S − Φ(X) = 0, entrywise
            let sym: Vec<ComplexMatrix> = images.iter().map(|y| &(&(&s * y) * &s) - y).collect();
            for r in 0..n {
                for col in 0..n {
                    rows.push(std::array::from_fn(|k| sym[k][(r, col)]));
                    rhs.push(ZERO);
                }
            }
            // (D⊗D)(Φ(D(X))) = B_cl(X): only diagonal units survive D
            if a == b {
                for k in 0..n {
                    rows.push(std::array::from_fn(|m| images[m][(k, k)]));
                    rhs.push(if k == a * d + a { ONE } else { ZERO });
                }
            }
        }
    }

    let gram = ComplexMatrix::from_fn(6, 6, |i, j| rows.iter().map(|r| r[i].conj() * r[j]).sum());
    let atb: Vec<C64> = (0..6)
        .map(|i| rows.iter().zip(&rhs).map(|(r, b)| r[i].conj() * b).sum())
        .collect();
    let sol = solve_gram(&gram, &atb, 1e-10);
    let x: [C64; 6] = sol.x.try_into().expect("six unknowns");
    let residual = rows
        .iter()
        .zip(&rhs)
        .map(|(r, b)| (r.iter().zip(&x).map(|(p, q)| p * q).sum::<C64>() - b).norm())
        .fold(0.0, f64::max);
    let free_directions = sol
        .null_space
        .into_iter()
        .map(|v| v.try_into().expect("six unknowns"))
        .collect();
    Ok(ConstraintSolution {
        coefficients: CovariantCoefficients::new(d, x)?,
        free_directions,
        residual,
    })
}
