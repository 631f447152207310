mod common;

use common::{frob, ginibre, idempotent, idempotent_case, rng};
use krein_core::decomp::{
    adjoint_similarity, complement_equivalence, contractive_expansive_split, extract_params, intertwining_unitaries,
    negative_part_projection_formula, negative_part_projection_unchecked, positive_negative_split, shifted_block,
};
use krein_core::numcore::{c, identity, scale_of, singular_values, spectral_parts};
use krein_core::projform::block_form;
use krein_core::symfactory::{sample_symmetries, SymmetryFamily};
use krein_core::ToleranceConfig;
use proptest::prelude::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn j_projection(case: (usize, usize, f64, usize, u64), seed: u64) -> (krein_core::CMatrix, krein_core::CMatrix) {
    let p = idempotent(case);
    let bf = block_form(&p, &tol()).unwrap();
    let j = sample_symmetries(&bf, SymmetryFamily::JProjection, 1, seed, &tol())
        .unwrap()
        .remove(0);
    (p, j)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negative_part_matches_spectral(m in 0usize..=8, k in 0usize..=6, amp in 0.0f64..3.0, seed in any::<u64>()) {
        let b = ginibre(m, k, &mut rng(seed)) * c(amp, 0.0);
        let t = tol();
        let formula = negative_part_projection_unchecked(&b, &t).unwrap();
        let oracle = spectral_parts(&shifted_block(&b), &t).unwrap().p_minus;
        prop_assert!(frob(&formula, &oracle) <= 1e-9);
        prop_assert!(negative_part_projection_formula(&b, &t).is_ok());
    }

    #[test]
    fn half_corner_gives_negative_part_of_sum(case in idempotent_case(10)) {
        let p = idempotent(case);
        let t = tol();
        let bf = block_form(&p, &t).unwrap();
        let half = negative_part_projection_unchecked(&(&bf.p1 * c(0.5, 0.0)), &t).unwrap();
        let minus = spectral_parts(&(&p + p.adjoint()), &t).unwrap().p_minus;
        prop_assert!(frob(&bf.to_ambient(&half), &minus) <= 1e-9 * scale_of(&p));
    }

    #[test]
    fn extracted_params_reassemble(case in idempotent_case(10), seed in any::<u64>()) {
        let (p, j) = j_projection(case, seed);
        let ep = extract_params(&p, &j, &tol()).unwrap();
        prop_assert!(frob(&(&ep.j1 * &ep.j1), &identity(ep.j1.nrows())) <= 1e-9);
        prop_assert!(frob(&(&ep.j2 * &ep.j2), &identity(ep.j2.nrows())) <= 1e-9);
    }

    #[test]
    fn splits_satisfy_their_identities(case in idempotent_case(10), seed in any::<u64>()) {
        let (p, j) = j_projection(case, seed);
        let t = tol();
        for split in [contractive_expansive_split(&p, &j, &t).unwrap(), positive_negative_split(&p, &j, &t).unwrap()] {
            let bound = 1e-9 * scale_of(&p).max(scale_of(&split.e1)).max(scale_of(&split.e2));
            for (name, r) in split.identity_residuals(&p) {
                prop_assert!(r <= bound, "{name}: {r:e}");
            }
            for (name, chk) in split.sign_checks(&j, &t) {
                prop_assert!(chk.holds, "{name}: {chk:?}");
            }
        }
    }

    #[test]
    fn split_of_complement_is_consistent(case in idempotent_case(10), seed in any::<u64>()) {
        let (p, j) = j_projection(case, seed);
        let t = tol();
        let n = p.nrows();
        let ce = contractive_expansive_split(&p, &j, &t).unwrap();
        let pn = positive_negative_split(&(identity(n) - &p), &j, &t).unwrap();
        let bound = 1e-9 * scale_of(&ce.e1).max(scale_of(&ce.e2));
        prop_assert!(frob(&ce.e1, &(identity(n) - &pn.e1)) <= bound);
        prop_assert!(frob(&ce.e2, &(identity(n) - &pn.e2)) <= bound);
    }

    #[test]
    fn intertwiners(case in idempotent_case(12)) {
        let p = idempotent(case);
        let t = tol();
        let tw = intertwining_unitaries(&p, &t).unwrap();
        prop_assert!(tw.residual <= 1e-9 * scale_of(&p));
        let (sp, sq) = (singular_values(&tw.p1), singular_values(&tw.q1));
        prop_assert_eq!(sp.len(), sq.len());
        for (a, b) in sp.iter().zip(&sq) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
        let a = adjoint_similarity(&p, &t).unwrap();
        prop_assert!(a.residual <= 1e-9 * scale_of(&p));
        let eq = complement_equivalence(&p, &t).unwrap();
        prop_assert!(eq.residual <= 1e-9 * scale_of(&p));
        prop_assert!(eq.spectrum_gap <= 1e-9 * scale_of(&p));
    }
}
