//! Monte-Carlo Haar twirling onto the covariant family.
//!
//! The twirl of `Φ` is the average over Haar-random `U` of
//! `X ↦ (U⊗U)^* Φ(U X U^*) (U⊗U)`. Its fixed points are exactly the covariant
//! maps, so the average converges to the covariant part of `Φ` at the usual
//! `samples^(-1/2)` Monte-Carlo rate. Samples are summed in index order, so
//! results are reproducible bit for bit.

use serde::{Deserialize, Serialize};

use crate::covmap2::{self, CovariantCoefficients};
use crate::error::{mismatch, Error, Result};
use crate::linalg::{kron, kron_all, superop_apply, superop_from_map, ComplexMatrix, ONE};
use crate::multicopy::covariance_residual_multi;
use crate::operators::{haar_unitary_indexed, RngSeed};

/// Haar unitaries used to estimate covariance deviations before and after twirling.
pub const DEVIATION_PROBES: usize = 16;
const PROBE_SALT: u64 = 0x0074_7769_726c;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwirlResult {
    pub coefficients: CovariantCoefficients,
    /// Operator-norm distance between the averaged map and its coefficient form.
    pub residual: f64,
    pub samples: usize,
    pub seed: RngSeed,
    pub deviation_before: f64,
    pub deviation_after: f64,
    /// Number of Haar unitaries behind each deviation estimate.
    pub probes: usize,
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

/// Average of `X ↦ (U⊗U)^* Φ(U X U^*) (U⊗U)` over the given unitaries.
pub fn twirl_average<'a>(
    superop: &ComplexMatrix,
    d: usize,
    unitaries: impl IntoIterator<Item = &'a ComplexMatrix>,
) -> Result<ComplexMatrix> {
    check_superop(superop, d)?;
    let mut acc = ComplexMatrix::zeros(superop.rows(), superop.cols());
    let mut count = 0usize;
    for u in unitaries {
        if u.shape() != (d, d) {
            return Err(mismatch(
                "twirl unitary",
                format!("{d}x{d}"),
                format!("{:?}", u.shape()),
            ));
        }
        let w_adj = kron(u, u).adjoint();
        let conjugated = superop_from_map(d, d * d, |x| {
            let y = superop_apply(superop, &u.conjugate_by(x)).expect("shape checked");
            w_adj.conjugate_by(&y)
        });
        acc.add_scaled(ONE, &conjugated);
        count += 1;
    }
    if count == 0 {
        return Err(Error::NoSamples);
    }
    Ok(acc.scale_real(1.0 / count as f64))
}

/// The Monte-Carlo twirl of a superoperator with `samples` Haar unitaries.
pub fn twirl_superoperator(
    superop: &ComplexMatrix,
    d: usize,
    samples: usize,
    seed: RngSeed,
) -> Result<ComplexMatrix> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    check_superop(superop, d)?;
    let mut acc = ComplexMatrix::zeros(superop.rows(), superop.cols());
    for k in 0..samples {
        let u = haar_unitary_indexed(d, seed, k as u64)?;
        acc.add_scaled(ONE, &twirl_average(superop, d, [&u])?);
    }
    Ok(acc.scale_real(1.0 / samples as f64))
}

/// Twirls, then reads off covariant coefficients: extraction for `d ≥ 3`,
/// the gauge-reduced least-squares representative at `d = 2`.
pub fn twirl(
    superop: &ComplexMatrix,
    d: usize,
    samples: usize,
    seed: RngSeed,
) -> Result<TwirlResult> {
    let averaged = twirl_superoperator(superop, d, samples, seed)?;
    let (coefficients, residual) = if d == 2 {
        covmap2::fit(&averaged, d)?
    } else {
        covmap2::extract(&averaged, d)?
    };
    let probe_seed = seed.derive(PROBE_SALT);
    Ok(TwirlResult {
        coefficients,
        residual,
        samples,
        seed,
        deviation_before: covariance_deviation(superop, d, DEVIATION_PROBES, probe_seed)?,
        deviation_after: covariance_deviation(&averaged, d, DEVIATION_PROBES, probe_seed)?,
        probes: DEVIATION_PROBES,
    })
}

/// Largest `‖Φ(UXU^*) − (U⊗U)Φ(X)(U⊗U)^*‖` over `samples` Haar unitaries and
/// all matrix units `X`.
pub fn covariance_deviation(
    superop: &ComplexMatrix,
    d: usize,
    samples: usize,
    seed: RngSeed,
) -> Result<f64> {
    check_superop(superop, d)?;
    covariance_residual_multi(superop, 2, d, samples, seed)
}

/// Average of `U^{⊗m} t (U^*)^{⊗m}` over `samples` Haar unitaries.
pub fn twirl_operator(
    t: &ComplexMatrix,
    m: usize,
    d: usize,
    samples: usize,
    seed: RngSeed,
) -> Result<ComplexMatrix> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    crate::multicopy::check_limits(m, d)?;
    let n = d.pow(m as u32);
    if t.shape() != (n, n) {
        return Err(mismatch(
            "twirl_operator",
            format!("{n}x{n}"),
            format!("{:?}", t.shape()),
        ));
    }
    let mut acc = ComplexMatrix::zeros(n, n);
    for k in 0..samples {
        let u = haar_unitary_indexed(d, seed, k as u64)?;
        let um = kron_all(std::iter::repeat_n(&u, m));
        acc.add_scaled(ONE, &um.conjugate_by(t));
    }
    Ok(acc.scale_real(1.0 / samples as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classical_broadcast_superoperator;
    use crate::linalg::C64;

    #[test]
    fn identity_sample_returns_input() {
        let b = classical_broadcast_superoperator(3).unwrap();
        let id = ComplexMatrix::identity(3);
        let out = twirl_average(&b, 3, [&id]).unwrap();
        assert_eq!(out, b);
        assert_eq!(twirl_average(&b, 3, []), Err(Error::NoSamples));
    }

    #[test]
    fn covariant_input_is_fixed() {
        let c = CovariantCoefficients::new(
            3,
            [0.3, -1.2, 0.5, 0.25, -0.4, 0.9].map(|v| C64::new(v, 0.1 * v)),
        )
        .unwrap();
        let r = twirl(&covmap2::realize_superoperator(&c), 3, 20, RngSeed(4)).unwrap();
        assert!(covmap2::maps_equal(
            &r.coefficients,
            &c,
            crate::linalg::Tolerance::absolute(1e-10)
        )
        .unwrap());
        assert!(r.residual < 1e-10);
        assert!(r.deviation_before < 1e-10 && r.deviation_after < 1e-10);
    }

    #[test]
    fn deviation_examples() {
        let b = classical_broadcast_superoperator(2).unwrap();
        assert!(covariance_deviation(&b, 2, 8, RngSeed(1)).unwrap() > 0.1);
        let zero = ComplexMatrix::zeros(16, 4);
        assert_eq!(covariance_deviation(&zero, 2, 4, RngSeed(1)).unwrap(), 0.0);
        assert!(covariance_deviation(&zero, 3, 4, RngSeed(1)).is_err());
    }

    #[test]
    fn twirl_is_deterministic() {
        let b = classical_broadcast_superoperator(3).unwrap();
        let a = twirl(&b, 3, 30, RngSeed(11)).unwrap();
        let again = twirl(&b, 3, 30, RngSeed(11)).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
        assert!(twirl(&b, 3, 0, RngSeed(11)).is_err());
    }
}
