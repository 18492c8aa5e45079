mod common;

use nalgebra::{DMatrix, DVector};

use covmap::classify::classical_broadcast_superoperator;
use covmap::covmap2::{maps_equal, realize_superoperator, CovariantCoefficients};
use covmap::linalg::{operator_norm, ComplexMatrix, Tolerance, C64};
use covmap::multicopy::schur_weyl_fit;
use covmap::operators::RngSeed;
use covmap::twirl::{twirl, twirl_operator, twirl_superoperator};

/// The exact twirl: Hilbert–Schmidt projection of the superoperator matrix onto
/// the span of the six realized basis maps (least squares via nalgebra's SVD).
fn exact_twirl(superop: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let columns: Vec<Vec<C64>> = (0..6)
        .map(|k| {
            let mut l = [C64::new(0.0, 0.0); 6];
            l[k] = C64::new(1.0, 0.0);
            let b = realize_superoperator(&CovariantCoefficients::new(d, l).unwrap());
            b.as_slice().to_vec()
        })
        .collect();
    let rows = columns[0].len();
    let a = DMatrix::from_fn(rows, 6, |r, k| columns[k][r]);
    let y = DVector::from_column_slice(superop.as_slice());
    let x = a.clone().svd(true, true).solve(&y, 1e-10).unwrap();
    let p = &a * x;
    ComplexMatrix::new(superop.rows(), superop.cols(), p.iter().copied().collect()).unwrap()
}

#[test]
fn covariant_inputs_are_fixed_points() {
    for d in 2..=3 {
        let c = common::random_coefficients(d, &mut common::rng(d as u64));
        let r = twirl(&realize_superoperator(&c), d, 10, RngSeed(3)).unwrap();
        assert!(maps_equal(&r.coefficients, &c, Tolerance::absolute(1e-11)).unwrap());
        assert!(r.residual < 1e-11);
        assert!(r.deviation_after < 1e-11);
    }
}

#[test]
fn monte_carlo_twirl_converges_to_projection() {
    let d = 2;
    let b = classical_broadcast_superoperator(d).unwrap();
    let target = exact_twirl(&b, d);
    let scale = operator_norm(&b);
    for n in [100, 1600] {
        let avg = twirl_superoperator(&b, d, n, RngSeed(21)).unwrap();
        let err = operator_norm(&(&avg - &target));
        assert!(err < 6.0 * scale / (n as f64).sqrt(), "N = {n}: {err}");
    }
}

/// Statistical fixed-point check: after twirling, the covariance deviation is
/// at the Monte-Carlo noise level rather than that of the input.
#[test]
fn twirling_classical_broadcasting_restores_covariance() {
    let d = 3;
    let b = classical_broadcast_superoperator(d).unwrap();
    let n = 2000;
    let r = twirl(&b, d, n, RngSeed(8)).unwrap();
    let noise = 3.0 / (n as f64).sqrt() * operator_norm(&b);
    assert!(r.deviation_before > 0.3);
    assert!(
        r.deviation_after < 10.0 * noise,
        "{} vs {}",
        r.deviation_after,
        noise
    );
    assert!(r.deviation_after < 0.25 * r.deviation_before);
    // the coefficients match those of the exact projection
    let exact = exact_twirl(&b, d);
    let (c_exact, _) = covmap::covmap2::extract(&exact, d).unwrap();
    let dist = r
        .coefficients
        .coeffs()
        .iter()
        .zip(c_exact.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(dist < 10.0 / (n as f64).sqrt(), "{dist}");
}

#[test]
fn operator_twirl_lands_near_commutant() {
    let (m, d) = (3, 2);
    let mut rng = common::rng(6);
    let t = common::random_matrix(8, &mut rng);
    let fit_before = schur_weyl_fit(&t, m, d).unwrap();
    let twirled = twirl_operator(&t, m, d, 3000, RngSeed(2)).unwrap();
    let fit_after = schur_weyl_fit(&twirled, m, d).unwrap();
    assert!(fit_after.residual < 0.1 * fit_before.residual);
    // the twirl preserves the commutant component
    for (a, b) in fit_after.coefficients.iter().zip(&fit_before.coefficients) {
        assert!((a - b).norm() < 0.15);
    }
}

#[test]
fn twirl_results_are_reproducible() {
    let b = classical_broadcast_superoperator(2).unwrap();
    let a = serde_json::to_string(&twirl(&b, 2, 50, RngSeed(4)).unwrap()).unwrap();
    let again = serde_json::to_string(&twirl(&b, 2, 50, RngSeed(4)).unwrap()).unwrap();
    let other = serde_json::to_string(&twirl(&b, 2, 50, RngSeed(5)).unwrap()).unwrap();
    assert_eq!(a, again);
    assert_ne!(a, other);
}

#[test]
fn argument_errors() {
    let b = classical_broadcast_superoperator(2).unwrap();
    assert!(twirl(&b, 2, 0, RngSeed(0)).is_err());
    assert!(twirl(&b, 3, 10, RngSeed(0)).is_err());
    assert!(twirl_operator(&ComplexMatrix::zeros(8, 8), 3, 3, 10, RngSeed(0)).is_err());
}
