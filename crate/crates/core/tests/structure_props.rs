mod common;

use common::{frob, idempotent, idempotent_case};
use krein_core::numcore::{c, identity, is_symmetry, loewner_geq, numerical_rank, spectral_parts};
use krein_core::projform::{block_form, kernel_projections_block, kernel_projections_direct};
use krein_core::symfactory::{
    assemble_symmetry, extremal_symmetries, sample_params, sign_formula_symmetry, ExtremalKind, SymmetryFamily,
};
use krein_core::ToleranceConfig;
use proptest::prelude::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

const FAMILIES: [SymmetryFamily; 3] = [
    SymmetryFamily::JProjection,
    SymmetryFamily::JPositive,
    SymmetryFamily::JContractive,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_form_round_trip(case in idempotent_case(20)) {
        let p = idempotent(case);
        let bf = block_form(&p, &tol()).unwrap();
        prop_assert!(frob(&bf.reassemble(), &p) <= 1e-10 * p.nrows() as f64 * krein_core::numcore::scale_of(&p));
        prop_assert_eq!(bf.rank(), case.1);
    }

    #[test]
    fn kernel_routes_agree(case in idempotent_case(20)) {
        let p = idempotent(case);
        let t = tol();
        let bf = block_form(&p, &t).unwrap();
        let direct = kernel_projections_direct(&p, &t).unwrap();
        let block = kernel_projections_block(&bf, &t).unwrap();
        let bound = t.residual_tol * krein_core::numcore::scale_of(&p);
        prop_assert!(frob(&direct.p_ker_sum, &block.p_ker_sum) <= bound);
        prop_assert!(frob(&direct.p_ker_diff, &block.p_ker_diff) <= bound);
    }

    #[test]
    fn ranks_are_complementary(case in idempotent_case(20)) {
        let p = idempotent(case);
        let n = p.nrows();
        let t = tol();
        prop_assert_eq!(numerical_rank(&p, &t).unwrap() + numerical_rank(&(identity(n) - &p), &t).unwrap(), n);
    }

    #[test]
    fn sampled_families_are_sound_and_bounded(case in idempotent_case(12), seed in any::<u64>()) {
        let p = idempotent(case);
        let t = tol();
        let bf = block_form(&p, &t).unwrap();
        let set = extremal_symmetries(&p, &t).unwrap();
        for family in FAMILIES {
            for params in sample_params(&bf, family, 4, seed, &t).unwrap() {
                let j = assemble_symmetry(&bf, &params, &t).unwrap();
                prop_assert!(is_symmetry(&j, &t).unwrap());
                prop_assert!(family.admits(&p, &j, &t), "{} rejects its own sample", family.name());
                let bounds = match family {
                    SymmetryFamily::JPositive => Some((&set.pos_min, &set.pos_max)),
                    SymmetryFamily::JContractive => Some((&set.contr_min, &set.contr_max)),
                    SymmetryFamily::JProjection => None,
                };
                if let Some((lo, hi)) = bounds {
                    prop_assert!(loewner_geq(&j, lo, &t).unwrap().0);
                    prop_assert!(loewner_geq(hi, &j, &t).unwrap().0);
                }
            }
        }
    }

    #[test]
    fn extremals_are_admissible_symmetries(case in idempotent_case(12)) {
        let p = idempotent(case);
        let t = tol();
        let set = extremal_symmetries(&p, &t).unwrap();
        for kind in ExtremalKind::ALL {
            let j = set.get(kind);
            prop_assert!(is_symmetry(j, &t).unwrap());
            prop_assert!(kind.family().admits(&p, j, &t), "{}", kind.name());
        }
    }

    #[test]
    fn identity_web(case in idempotent_case(12)) {
        let p = idempotent(case);
        let t = tol();
        let a = &p + p.adjoint();
        let sp = spectral_parts(&a, &t).unwrap();
        let set = extremal_symmetries(&p, &t).unwrap();
        let bound = t.residual_tol * krein_core::numcore::scale_of(&p);
        prop_assert!(frob(&set.pos_min, &(&sp.p_plus - &sp.p_minus - &sp.p_ker)) <= bound);
        prop_assert!(frob(&set.pos_max, &(&sp.p_plus - &sp.p_minus + &sp.p_ker)) <= bound);
        prop_assert!(frob(&set.contr_min, &(&sp.p_minus - &sp.p_plus + &sp.p_ker)) <= bound);
    }

    #[test]
    fn sign_formula_agrees_with_pos_max(case in idempotent_case(12)) {
        let p = idempotent(case);
        let t = tol();
        let sf = sign_formula_symmetry(&p, &t).unwrap();
        let pos_max = extremal_symmetries(&p, &t).unwrap().pos_max;
        prop_assert!(frob(&sf.symmetry, &pos_max) <= t.residual_tol * krein_core::numcore::scale_of(&p));
        // |P + P* - I| >= I for an idempotent
        prop_assert!(sf.shift_gap >= 1.0 - 1e-9);
    }

    #[test]
    fn orthogonal_projections_collapse(n in 1usize..=10, r in 0usize..=10, seed in any::<u64>()) {
        let r = r.min(n);
        let p = idempotent((n, r, 0.0, 0, seed));
        let t = tol();
        let set = extremal_symmetries(&p, &t).unwrap();
        prop_assert!(frob(&set.pos_max, &identity(n)) <= 1e-9);
        prop_assert!(frob(&set.contr_max, &identity(n)) <= 1e-9);
        let two = c(2.0, 0.0);
        prop_assert!(frob(&set.pos_min, &(&p * two - identity(n))) <= 1e-9);
    }
}
