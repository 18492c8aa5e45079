//! Completely bounded norms of the trace-free family
//! `Ψ(X) = l1·I⊗X + l2·X⊗I + l3·S(I⊗X) + l4·S(X⊗I)`.
//!
//! With `Q = (I⊗I + S)/2` and `Q⊥ = I⊗I − Q`,
//! `Ψ(X) = μ1·Q(I⊗X)Q + μ2·Q(I⊗X)Q⊥ + μ3·Q⊥(I⊗X)Q + μ4·Q⊥(I⊗X)Q⊥`
//! where the corner coefficients are
//! `μ1 = l1+l2+l3+l4`, `μ2 = l1−l2+l3−l4`, `μ3 = l1−l2−l3+l4`, `μ4 = l1+l2−l3−l4`.
//! On the variety `l1·l2 = l3·l4` (equivalently `μ1·μ4 = μ2·μ3`) the cb-norm is
//! at most `max|μ_i|`, and equals `‖Ψ(I)‖ = max{|μ1|, |μ4|}` when that
//! dominates `|μ2|, |μ3|`. Otherwise only sampled lower bounds are available.

use serde::{Deserialize, Serialize};

use crate::covmap2::{self, CovariantCoefficients};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, ComplexMatrix, Tolerance, C64};
use crate::operators::{gaussian_hermitian, haar_unitary_from, RngSeed};

/// Relative tolerance (scaled by `max|l_i|²`) for membership in `l1·l2 = l3·l4`.
pub const VARIETY_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "value_kind", content = "value", rename_all = "snake_case")]
pub enum CbValue {
    Exact(f64),
    UpperBound(f64),
    LowerBound(f64),
    Bracket { lower: f64, upper: f64 },
}

impl CbValue {
    /// Best available lower bound.
    pub fn lower(&self) -> Option<f64> {
        match *self {
            CbValue::Exact(v) | CbValue::LowerBound(v) => Some(v),
            CbValue::Bracket { lower, .. } => Some(lower),
            CbValue::UpperBound(_) => None,
        }
    }

    /// Best available upper bound.
    pub fn upper(&self) -> Option<f64> {
        match *self {
            CbValue::Exact(v) | CbValue::UpperBound(v) => Some(v),
            CbValue::Bracket { upper, .. } => Some(upper),
            CbValue::LowerBound(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CbMethod {
    /// Permutation-invariant maps: `‖Ψ‖_cb = ‖Ψ(I)‖`.
    #[serde(rename = "corollary12")]
    PermutationInvariant,
    /// Corner-coefficient bound on the variety `l1·l2 = l3·l4`.
    #[serde(rename = "proposition14")]
    CornerBound,
    /// Sampled lower bound only.
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CbNormResult {
    #[serde(flatten)]
    pub value: CbValue,
    pub method: CbMethod,
    /// `|μ1|, …, |μ4|` when the corner bound applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<[f64; 4]>,
    /// Number of sampled inputs behind a sampled bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

fn trace_free(c: &CovariantCoefficients, tol: Tolerance) -> Result<[C64; 4]> {
    match covmap2::trace_free_representative(c, tol) {
        Some(t) => {
            let l = t.coeffs();
            Ok([l[0], l[1], l[2], l[3]])
        }
        None => Err(Error::TraceTermsPresent {
            l5: format!("{}", c.l(5)),
            l6: format!("{}", c.l(6)),
        }),
    }
}

/// `(μ1, μ2, μ3, μ4)` of the block decomposition with respect to `Q, Q⊥`.
pub fn corner_coefficients(l: [C64; 4]) -> [C64; 4] {
    let [l1, l2, l3, l4] = l;
    [
        l1 + l2 + l3 + l4,
        l1 - l2 + l3 - l4,
        l1 - l2 - l3 + l4,
        l1 + l2 - l3 - l4,
    ]
}

/// `‖Ψ(I)‖ = max{|l1+l2+l3+l4|, |l1+l2−l3−l4|}`, since `Ψ(I) = (l1+l2)I⊗I + (l3+l4)S`.
pub fn psi_identity_norm(c: &CovariantCoefficients, tol: Tolerance) -> Result<f64> {
    let [l1, l2, l3, l4] = trace_free(c, tol)?;
    Ok((l1 + l2 + l3 + l4).norm().max((l1 + l2 - l3 - l4).norm()))
}

fn on_variety(l: [C64; 4]) -> bool {
    let scale = l.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    (l[0] * l[1] - l[2] * l[3]).norm() <= VARIETY_REL_TOL * scale
}

/// cb-norm of a trace-free map, exact where a closed form applies and a
/// bracket or sampled lower bound otherwise.
///
/// Decision order: on the variety with `‖Ψ(I)‖ ≥ |μ2|, |μ3|` the value is
/// exact; permutation-invariant maps are exact; remaining variety points get
/// a bracket; everything else gets a sampled lower bound.
pub fn cb_norm(
    c: &CovariantCoefficients,
    samples: usize,
    seed: RngSeed,
    tol: Tolerance,
) -> Result<CbNormResult> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let l = trace_free(c, tol)?;
    let mu = corner_coefficients(l);
    let mags = mu.map(|z| z.norm());
    let psi_i = mags[0].max(mags[3]);
    let variety = on_variety(l);
    let scale = l.iter().map(|z| z.norm()).fold(0.0, f64::max);

    if variety && psi_i >= mags[1].max(mags[2]) {
        return Ok(CbNormResult {
            value: CbValue::Exact(psi_i),
            method: CbMethod::CornerBound,
            detail: Some(mags),
            samples: None,
        });
    }
    let perm_invariant =
        tol.is_small((l[0] - l[1]).norm(), scale) && tol.is_small((l[2] - l[3]).norm(), scale);
    if perm_invariant {
        // μ1 = l1, μ2 = l3 in the symmetric parametrization
        let (a, b) = (l[0], l[2]);
        let value = (2.0 * (a + b).norm()).max(2.0 * (a - b).norm());
        return Ok(CbNormResult {
            value: CbValue::Exact(value),
            method: CbMethod::PermutationInvariant,
            detail: None,
            samples: None,
        });
    }
    let lower = monte_carlo_norm(c, samples, seed, tol)?;
    if variety {
        let upper = mags.iter().copied().fold(0.0, f64::max);
        return Ok(CbNormResult {
            value: CbValue::Bracket { lower, upper },
            method: CbMethod::CornerBound,
            detail: Some(mags),
            samples: Some(samples),
        });
    }
    Ok(CbNormResult {
        value: CbValue::LowerBound(lower),
        method: CbMethod::MonteCarlo,
        detail: None,
        samples: Some(samples),
    })
}

/// The `k`-th probe input: `I` for `k = 0`, then alternately a Haar unitary
/// and a Gaussian Hermitian scaled to operator norm one.
fn probe(d: usize, seed: RngSeed, k: usize) -> ComplexMatrix {
    if k == 0 {
        return ComplexMatrix::identity(d);
    }
    let mut rng = seed.stream(k as u64);
    if k % 2 == 1 {
        haar_unitary_from(d, &mut rng)
    } else {
        let h = gaussian_hermitian(d, &mut rng);
        let n = operator_norm(&h);
        h.scale_real(1.0 / n)
    }
}

/// `max ‖Ψ(X)‖` over `samples` inputs with `‖X‖ = 1`, the first being `I`.
/// A lower bound for `‖Ψ‖ ≤ ‖Ψ‖_cb`; nondecreasing in `samples` for a fixed seed.
pub fn monte_carlo_norm(
    c: &CovariantCoefficients,
    samples: usize,
    seed: RngSeed,
    tol: Tolerance,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let l = trace_free(c, tol)?;
    let t = CovariantCoefficients::trace_free(c.d(), l)?;
    let mut best = 0.0_f64;
    for k in 0..samples {
        let x = probe(c.d(), seed, k);
        best = best.max(operator_norm(&covmap2::apply(&t, &x)?));
    }
    Ok(best)
}

/// Both sides of the corner-norm inequality
/// `‖μ1·PAP + μ2·PAP⊥ + μ3·P⊥AP + μ4·P⊥AP⊥‖ ≤ max|μ_i|·‖A‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl CornerBoundCheck {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Evaluates the corner-norm inequality for an orthogonal projector `p` and
/// corner weights `mu` with `μ1·μ4 = μ2·μ3`.
pub fn corner_norm_bound_check(
    p: &ComplexMatrix,
    a: &ComplexMatrix,
    mu: [C64; 4],
    tol: Tolerance,
) -> Result<CornerBoundCheck> {
    if !p.is_square() || p.shape() != a.shape() {
        return Err(crate::error::mismatch(
            "corner_norm_bound_check",
            format!("{:?}", p.shape()),
            format!("{:?}", a.shape()),
        ));
    }
    let defect = (&(p * p) - p).max_abs() + (p - &p.adjoint()).max_abs();
    if defect > tol.bound(1.0) {
        return Err(Error::NotProjector(defect));
    }
    let mu_max = mu.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let variety_gap = (mu[0] * mu[3] - mu[1] * mu[2]).norm();
    if variety_gap > tol.bound(mu_max * mu_max) {
        return Err(Error::VarietyViolated(variety_gap));
    }
    let q = &ComplexMatrix::identity(p.rows()) - p;
    let mut total = (&(p * a) * p).scale(mu[0]);
    total.add_scaled(mu[1], &(&(p * a) * &q));
    total.add_scaled(mu[2], &(&(&q * a) * p));
    total.add_scaled(mu[3], &(&(&q * a) * &q));
    let lhs = operator_norm(&total);
    let rhs = mu_max * operator_norm(a);
    Ok(CornerBoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + tol.bound(rhs),
    })
}
