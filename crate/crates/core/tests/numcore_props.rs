mod common;

use common::{frob, ginibre, hermitian, low_rank, rng};
use krein_core::numcore::{identity, inv_sqrt_pd, loewner_geq, polar, range_projection, scale_of, spectral_parts};
use krein_core::ToleranceConfig;
use proptest::prelude::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_parts_reconstruct(n in 1usize..=20, seed in any::<u64>()) {
        let a = hermitian(n, &mut rng(seed));
        let sp = spectral_parts(&a, &tol()).unwrap();
        let bound = 1e-9 * scale_of(&a);
        prop_assert!(frob(&(&sp.a_plus - &sp.a_minus), &a) <= bound);
        prop_assert!(frob(&(&sp.p_plus + &sp.p_minus + &sp.p_ker), &identity(n)) <= 1e-9);
    }

    #[test]
    fn spectral_parts_of_rank_deficient(n in 2usize..=12, k in 0usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = low_rank(n, n, k.min(n), &mut r);
        let a = &b * b.adjoint() - b.adjoint() * &b;
        let sp = spectral_parts(&a, &tol()).unwrap();
        prop_assert!(frob(&(&sp.a_plus - &sp.a_minus), &a) <= 1e-9 * scale_of(&a));
        prop_assert!((&sp.p_plus * &sp.p_minus).norm() <= 1e-9);
    }

    #[test]
    fn sign_matches_inverse_square_root(n in 1usize..=12, seed in any::<u64>()) {
        let a = hermitian(n, &mut rng(seed));
        let sp = spectral_parts(&a, &tol()).unwrap();
        prop_assume!(sp.p_ker.norm() < 1e-12);
        let sign = &a * inv_sqrt_pd(&(&a * &a));
        prop_assert!(frob(&(&sp.p_plus - &sp.p_minus), &sign) <= 1e-9 * scale_of(&a).max(1.0) * n as f64);
    }

    #[test]
    fn polar_factors(rows in 1usize..=8, cols in 1usize..=8, k in 0usize..=8, seed in any::<u64>()) {
        let t = low_rank(rows, cols, k.min(rows).min(cols), &mut rng(seed));
        let pp = polar(&t, &tol()).unwrap();
        prop_assert!(frob(&(&pp.v * &pp.modulus), &t) <= 1e-9 * scale_of(&t));
        let support = range_projection(&t.adjoint(), &tol()).unwrap();
        prop_assert!(frob(&(pp.v.adjoint() * &pp.v), &support) <= 1e-9);
    }

    #[test]
    fn loewner_reflexive_and_antisymmetric(n in 1usize..=10, seed in any::<u64>(), eps in 0.0f64..1e-11) {
        let mut r = rng(seed);
        let a = hermitian(n, &mut r);
        let t = tol();
        prop_assert!(loewner_geq(&a, &a, &t).unwrap().0);
        let b = &a + identity(n) * krein_core::numcore::c(eps, 0.0);
        let (ab, _) = loewner_geq(&a, &b, &t).unwrap();
        let (ba, _) = loewner_geq(&b, &a, &t).unwrap();
        if ab && ba {
            prop_assert!(frob(&a, &b) <= 10.0 * t.psd_tol * n as f64 * scale_of(&a).max(scale_of(&b)));
        }
        let c = &a + hermitian(n, &mut r);
        let (ac, _) = loewner_geq(&a, &c, &t).unwrap();
        let (ca, _) = loewner_geq(&c, &a, &t).unwrap();
        if ac && ca {
            prop_assert!(frob(&a, &c) <= 10.0 * t.psd_tol * n as f64 * scale_of(&a).max(scale_of(&c)));
        }
    }

    #[test]
    fn range_projection_is_orthogonal_projection(rows in 1usize..=9, cols in 1usize..=9, seed in any::<u64>()) {
        let t = ginibre(rows, cols, &mut rng(seed));
        let p = range_projection(&t, &tol()).unwrap();
        prop_assert!(frob(&(&p * &p), &p) <= 1e-12);
        prop_assert!(frob(&p, &p.adjoint()) <= 1e-12);
        prop_assert!(frob(&(&p * &t), &t) <= 1e-9 * scale_of(&t));
    }
}
