mod common;

use proptest::prelude::*;

use covmap::covmap2::{self, CovariantCoefficients};
use covmap::error::Error;
use covmap::linalg::{ComplexMatrix, C64};
use covmap::multicopy::{
    apply_multi, covariance_residual_multi, extract_multi, realize_multi, schur_weyl_fit,
    slot_embedding, MultiCopyCoefficients,
};
use covmap::operators::{permutation_operator, Permutation, RngSeed};

fn factorial(m: usize) -> usize {
    (1..=m).product()
}

fn random_multi(m: usize, d: usize, seed: u64) -> MultiCopyCoefficients {
    let mut rng = common::rng(seed);
    let lam = (0..factorial(m))
        .map(|_| (0..=m).map(|_| common::complex(&mut rng)).collect())
        .collect();
    MultiCopyCoefficients::new(m, d, lam).unwrap()
}

/// `Σ λ_ij Γ(s_i) Φ_j(X)` with dense products and explicit Kronecker factors.
fn oracle_apply(mc: &MultiCopyCoefficients, x: &ComplexMatrix) -> ComplexMatrix {
    let (m, d) = (mc.m(), mc.d());
    let n = d.pow(m as u32);
    let id = ComplexMatrix::identity(d);
    let slot = |j: usize| -> ComplexMatrix {
        if j == 1 {
            return ComplexMatrix::identity(n).scale(common::trace(x));
        }
        (1..=m).fold(ComplexMatrix::identity(1), |acc, k| {
            common::kron(&acc, if k == j - 1 { x } else { &id })
        })
    };
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, p) in Permutation::all(m).iter().enumerate() {
        let g = permutation_operator(p, d).unwrap();
        for j in 1..=m + 1 {
            out = &out + &(&g * &slot(j)).scale(mc.get(i, j));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn apply_matches_dense_oracle(seed in 0u64..10_000, d in 2usize..4) {
        let mc = random_multi(3, d, seed);
        let x = common::random_matrix(d, &mut common::rng(seed + 1));
        prop_assert!(common::max_diff(&apply_multi(&mc, &x).unwrap(), &oracle_apply(&mc, &x)) < 1e-12);
    }

    #[test]
    fn two_copy_path_agrees(seed in 0u64..10_000) {
        let c = common::random_coefficients(3, &mut common::rng(seed));
        let mc = MultiCopyCoefficients::from_two_copy(&c);
        let x = common::random_matrix(3, &mut common::rng(seed + 1));
        let a = apply_multi(&mc, &x).unwrap();
        let b = covmap2::apply(&c, &x).unwrap();
        prop_assert!(common::max_diff(&a, &b) < 1e-13);
        prop_assert_eq!(mc.to_two_copy().unwrap(), c);
    }

    #[test]
    fn extraction_round_trip_two_copies(seed in 0u64..10_000) {
        let mc = random_multi(2, 3, seed);
        let (back, residual) = extract_multi(&realize_multi(&mc), 2, 3).unwrap();
        prop_assert!(back.max_abs_diff(&mc) < 1e-12);
        prop_assert!(residual < 1e-12);
    }
}

#[test]
fn extraction_round_trip_three_copies() {
    for seed in 0..3 {
        let mc = random_multi(3, 4, seed);
        let (back, residual) = extract_multi(&realize_multi(&mc), 3, 4).unwrap();
        assert!(back.max_abs_diff(&mc) < 1e-11);
        assert!(residual < 1e-10);
    }
}

#[test]
fn realized_maps_are_covariant() {
    for (m, d) in [(2, 3), (3, 2), (3, 3), (4, 2)] {
        let mc = random_multi(m, d, (m * 10 + d) as u64);
        let r = covariance_residual_multi(&realize_multi(&mc), m, d, 5, RngSeed(1)).unwrap();
        assert!(r < 1e-11, "m = {m}, d = {d}: {r}");
    }
}

#[test]
fn non_covariant_map_has_large_residual() {
    // X ↦ X ⊗ e1e1^* ⊗ I
    let d = 2;
    let mut e11 = ComplexMatrix::zeros(d, d);
    e11[(0, 0)] = C64::new(1.0, 0.0);
    let id = ComplexMatrix::identity(d);
    let s = covmap::linalg::superop_from_map(d, 8, |x| common::kron(&common::kron(x, &e11), &id));
    assert!(covariance_residual_multi(&s, 3, d, 4, RngSeed(0)).unwrap() > 0.1);
}

#[test]
fn uniqueness_and_size_limits() {
    let mc = random_multi(3, 3, 0);
    assert_eq!(
        extract_multi(&realize_multi(&mc), 3, 3).unwrap_err(),
        Error::UniquenessUnavailable {
            m: 3,
            d: 3,
            needed: 4
        }
    );
    assert!(MultiCopyCoefficients::zero(5, 2).is_err());
    assert!(MultiCopyCoefficients::zero(3, 7).is_err());
    assert!(MultiCopyCoefficients::new(2, 3, vec![vec![C64::new(0.0, 0.0); 3]]).is_err());
    assert!(slot_embedding(5, &ComplexMatrix::identity(2), 3, 2).is_err());
}

#[test]
fn slot_embedding_places_x() {
    let x = common::random_matrix(2, &mut common::rng(3));
    let id = ComplexMatrix::identity(2);
    let expected = common::kron(&common::kron(&id, &x), &id);
    assert_eq!(slot_embedding(3, &x, 3, 2).unwrap(), expected);
    let tr = slot_embedding(1, &x, 3, 2).unwrap();
    assert_eq!(tr, ComplexMatrix::identity(8).scale(common::trace(&x)));
}

#[test]
fn schur_weyl_fit_of_basis_elements() {
    let d = 3;
    let perms = Permutation::all(3);
    for (i, p) in perms.iter().enumerate() {
        let fit = schur_weyl_fit(&permutation_operator(p, d).unwrap(), 3, d).unwrap();
        assert!(!fit.degenerate);
        assert!(fit.residual < 1e-12);
        for (k, z) in fit.coefficients.iter().enumerate() {
            let e = if k == i { 1.0 } else { 0.0 };
            assert!((z - C64::new(e, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn schur_weyl_fit_recovers_combinations_and_orthogonal_remainders() {
    let (m, d) = (3, 3);
    let mut rng = common::rng(12);
    let coeffs: Vec<C64> = (0..6).map(|_| common::complex(&mut rng)).collect();
    let mut t = ComplexMatrix::zeros(27, 27);
    for (z, p) in coeffs.iter().zip(Permutation::all(m)) {
        t = &t + &permutation_operator(&p, d).unwrap().scale(*z);
    }
    let fit = schur_weyl_fit(&t, m, d).unwrap();
    for (a, b) in fit.coefficients.iter().zip(&coeffs) {
        assert!((a - b).norm() < 1e-12);
    }
    // e1e2^* ⊗ I ⊗ I is orthogonal to every Γ(s)
    let mut e12 = ComplexMatrix::zeros(d, d);
    e12[(0, 1)] = C64::new(1.0, 0.0);
    let id = ComplexMatrix::identity(d);
    let off = common::kron(&common::kron(&e12, &id), &id);
    let fit = schur_weyl_fit(&(&t + &off), m, d).unwrap();
    assert!((fit.residual - off.frobenius_norm()).abs() < 1e-12);
}

/// At `d = 2` the six `Γ(s)` on three qubits satisfy `Σ sign(s) Γ(s) = 0`.
#[test]
fn schur_weyl_fit_below_uniqueness_threshold() {
    let perms = Permutation::all(3);
    let cycle = Permutation::parse("(1 2 3)", Some(3)).unwrap();
    let fit = schur_weyl_fit(&permutation_operator(&cycle, 2).unwrap(), 3, 2).unwrap();
    assert!(fit.degenerate);
    assert!(fit.residual < 1e-12);
    let idx = perms.iter().position(|p| *p == cycle).unwrap();
    let signs: Vec<f64> = perms.iter().map(|p| p.sign() as f64).collect();
    // fit − unit vector must be a multiple of the sign vector
    let diff: Vec<C64> = fit
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, z)| z - C64::new((k == idx) as u8 as f64, 0.0))
        .collect();
    let t = diff.iter().zip(&signs).map(|(z, s)| z * s).sum::<C64>() / 6.0;
    for (z, s) in diff.iter().zip(&signs) {
        assert!((z - t * s).norm() < 1e-12);
    }
}

#[test]
fn json_round_trip() {
    let mc = random_multi(3, 4, 5);
    let back: MultiCopyCoefficients =
        serde_json::from_str(&serde_json::to_string(&mc).unwrap()).unwrap();
    assert_eq!(back, mc);
    let c = CovariantCoefficients::virtual_broadcaster(3).unwrap();
    assert_eq!(
        MultiCopyCoefficients::from_two_copy(&c).get(1, 3),
        C64::new(0.5, 0.0)
    );
}
