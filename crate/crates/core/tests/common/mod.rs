#![allow(dead_code)]

use krein_core::numcore::c;
use krein_core::CMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = ginibre(n, n, rng);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Random matrix of rank at most `k`.
pub fn low_rank(rows: usize, cols: usize, k: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    ginibre(rows, k, rng) * ginibre(k, cols, rng)
}

pub fn frob(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

pub fn idempotent_case(max_dim: usize) -> impl proptest::strategy::Strategy<Value = (usize, usize, f64, usize, u64)> {
    use proptest::prelude::*;
    (1usize..=max_dim).prop_flat_map(|n| {
        (
            Just(n),
            0usize..=n,
            prop_oneof![Just(0.0), Just(0.5), Just(2.0)],
            0usize..=2,
            any::<u64>(),
        )
    })
}

pub fn idempotent(case: (usize, usize, f64, usize, u64)) -> CMatrix {
    let (n, r, scale, zero_cols, seed) = case;
    krein_core::projform::IdempotentGenerator::new(n, r, scale)
        .with_zero_corner_cols(zero_cols.min(n - r))
        .sample(seed)
        .unwrap()
}
