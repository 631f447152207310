//! Idempotents: validation, the `[[I, P1], [0, 0]]` block form over
//! `R(P) ⊕ R(P)^⊥`, kernel projections of `P ± P*`, and seeded generators.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{KreinError, Result};
use crate::numcore::{
    block2x2, c, complement_basis, direct_sum, ensure_finite, ensure_square, frobenius, hstack, identity,
    null_projection, range_basis, scale_of, spectral_parts, zeros, CMatrix, ToleranceConfig,
};

/// Largest corner-block norm produced by the generators, so that `||P|| <= 10`.
pub const MAX_CORNER_NORM: f64 = 9.949_874_371_066_2;

/// Deterministic RNG for item `stream` of a batch seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Frobenius norm of `P^2 - P` and the bound it is held to.
pub fn idempotency_residual(p: &CMatrix, tol: &ToleranceConfig) -> Result<(f64, f64)> {
    ensure_square(p)?;
    ensure_finite(p)?;
    let residual = frobenius(&(p * p - p));
    Ok((residual, tol.residual_tol * scale_of(p)))
}

pub fn validate_idempotent(p: &CMatrix, tol: &ToleranceConfig) -> Result<bool> {
    let (residual, bound) = idempotency_residual(p, tol)?;
    Ok(residual <= bound)
}

pub(crate) fn require_idempotent(p: &CMatrix, tol: &ToleranceConfig) -> Result<()> {
    let (residual, tolerance) = idempotency_residual(p, tol)?;
    if residual <= tolerance {
        Ok(())
    } else {
        Err(KreinError::NotIdempotent { residual, tolerance })
    }
}

/// Orthonormal bases of `R(P)` and `R(P)^⊥` plus the corner block `P1`.
///
/// In the basis `W = [basis_range | basis_perp]`, `W* P W = [[I, P1], [0, 0]]`.
#[derive(Debug, Clone)]
pub struct BlockForm {
    pub basis_range: CMatrix,
    pub basis_perp: CMatrix,
    pub p1: CMatrix,
}

impl BlockForm {
    pub fn dim(&self) -> usize {
        self.basis_range.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis_range.ncols()
    }

    pub fn corank(&self) -> usize {
        self.basis_perp.ncols()
    }

    /// `[basis_range | basis_perp]`.
    pub fn unitary(&self) -> CMatrix {
        hstack(&self.basis_range, &self.basis_perp)
    }

    /// Maps a block-coordinate operator back to the ambient basis.
    pub fn to_ambient(&self, block: &CMatrix) -> CMatrix {
        let w = self.unitary();
        &w * block * w.adjoint()
    }

    /// Ambient operator in block coordinates.
    pub fn to_block(&self, m: &CMatrix) -> CMatrix {
        let w = self.unitary();
        w.adjoint() * m * &w
    }

    /// Embeds an operator on `R(P)` (in `basis_range` coordinates).
    pub fn embed_range(&self, m: &CMatrix) -> CMatrix {
        &self.basis_range * m * self.basis_range.adjoint()
    }

    /// Embeds an operator on `R(P)^⊥` (in `basis_perp` coordinates).
    pub fn embed_perp(&self, m: &CMatrix) -> CMatrix {
        &self.basis_perp * m * self.basis_perp.adjoint()
    }

    /// `[[I, P1], [0, 0]]`.
    pub fn canonical_block(&self) -> CMatrix {
        let (r, s) = (self.rank(), self.corank());
        block2x2(&identity(r), &self.p1, &zeros(s, r), &zeros(s, s))
    }

    pub fn reassemble(&self) -> CMatrix {
        self.to_ambient(&self.canonical_block())
    }

    /// Projection onto `N(P1)` in `R(P)^⊥` coordinates.
    pub fn null_p1(&self, tol: &ToleranceConfig) -> Result<CMatrix> {
        null_projection(&self.p1, tol)
    }

    /// Projection onto `N(P1*)` in `R(P)` coordinates.
    pub fn null_p1_adjoint(&self, tol: &ToleranceConfig) -> Result<CMatrix> {
        null_projection(&self.p1.adjoint(), tol)
    }
}

/// Rotates each column so that its first dominant entry is real and positive.
fn normalize_phases(m: &mut CMatrix) {
    for mut col in m.column_iter_mut() {
        let peak = col.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        if peak == 0.0 {
            continue;
        }
        if let Some(z) = col.iter().find(|z| z.norm() > 0.5 * peak).copied() {
            let phase = z.conj() / z.norm();
            col.scale_mut_complex(phase);
        }
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, s: Complex64);
}

impl<S> ScaleComplex for nalgebra::Matrix<Complex64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<Complex64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, s: Complex64) {
        for z in self.iter_mut() {
            *z *= s;
        }
    }
}

pub fn block_form(p: &CMatrix, tol: &ToleranceConfig) -> Result<BlockForm> {
    require_idempotent(p, tol)?;
    let mut basis_range = range_basis(p, tol)?;
    normalize_phases(&mut basis_range);
    let mut basis_perp = complement_basis(&basis_range);
    normalize_phases(&mut basis_perp);
    let p1 = basis_range.adjoint() * p * &basis_perp;
    Ok(BlockForm {
        basis_range,
        basis_perp,
        p1,
    })
}

/// Orthogonal projections onto `N(P + P*)` and `N(P - P*)`.
#[derive(Debug, Clone)]
pub struct KernelProjections {
    pub p_ker_sum: CMatrix,
    pub p_ker_diff: CMatrix,
}

/// Kernel projections from the spectra of `P + P*` and `i(P - P*)`.
pub fn kernel_projections_direct(p: &CMatrix, tol: &ToleranceConfig) -> Result<KernelProjections> {
    let sum = p + p.adjoint();
    let skew = (p - p.adjoint()) * c(0.0, 1.0);
    Ok(KernelProjections {
        p_ker_sum: spectral_parts(&sum, tol)?.p_ker,
        p_ker_diff: spectral_parts(&skew, tol)?.p_ker,
    })
}

/// Kernel projections from the block identities `N(P+P*) = 0 ⊕ N(P1)` and
/// `N(P-P*) = N(P1*) ⊕ N(P1)`.
pub fn kernel_projections_block(bf: &BlockForm, tol: &ToleranceConfig) -> Result<KernelProjections> {
    let n_p1 = bf.null_p1(tol)?;
    let n_p1_adj = bf.null_p1_adjoint(tol)?;
    let r = bf.rank();
    Ok(KernelProjections {
        p_ker_sum: bf.to_ambient(&direct_sum(&zeros(r, r), &n_p1)),
        p_ker_diff: bf.to_ambient(&direct_sum(&n_p1_adj, &n_p1)),
    })
}

/// Both kernel projections, cross-checked between the spectral and block routes.
pub fn kernel_projections(p: &CMatrix, tol: &ToleranceConfig) -> Result<KernelProjections> {
    let bf = block_form(p, tol)?;
    let direct = kernel_projections_direct(p, tol)?;
    let block = kernel_projections_block(&bf, tol)?;
    let bound = tol.residual_tol * scale_of(p);
    let sum_gap = frobenius(&(&direct.p_ker_sum - &block.p_ker_sum));
    if sum_gap > bound {
        return Err(KreinError::InternalMismatch {
            what: "projection onto N(P + P*)",
            residual: sum_gap,
        });
    }
    let diff_gap = frobenius(&(&direct.p_ker_diff - &block.p_ker_diff));
    if diff_gap > bound {
        return Err(KreinError::InternalMismatch {
            what: "projection onto N(P - P*)",
            residual: diff_gap,
        });
    }
    Ok(direct)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-distributed `n x n` unitary (QR of a complex Ginibre matrix, phases fixed).
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    if n == 0 {
        return zeros(0, 0);
    }
    let z = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        q.column_mut(k).scale_mut_complex(phase);
    }
    q
}

/// Point drawn uniformly from the closed disk of radius `radius`.
fn disk_point(rng: &mut impl Rng, radius: f64) -> Complex64 {
    let rho = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(rho, theta)
}

/// Seeded generator of idempotents `W [[I_r, B], [0, 0]] W*`.
#[derive(Debug, Clone, Copy)]
pub struct IdempotentGenerator {
    pub dim: usize,
    pub rank: usize,
    /// Entries of `B` have magnitude at most this.
    pub corner_scale: f64,
    /// Leading columns of `B` forced to zero, making `P1` rank-deficient.
    pub zero_corner_cols: usize,
}

impl IdempotentGenerator {
    pub fn new(dim: usize, rank: usize, corner_scale: f64) -> Self {
        Self {
            dim,
            rank,
            corner_scale,
            zero_corner_cols: 0,
        }
    }

    pub fn with_zero_corner_cols(mut self, cols: usize) -> Self {
        self.zero_corner_cols = cols;
        self
    }

    pub fn sample(&self, seed: u64) -> Result<CMatrix> {
        let (n, r) = (self.dim, self.rank);
        if r > n {
            return Err(KreinError::BadRank { dim: n, rank: r });
        }
        if !(self.corner_scale.is_finite() && self.corner_scale >= 0.0) {
            return Err(KreinError::BadParameter {
                name: "corner_scale",
                value: self.corner_scale,
            });
        }
        if r == n {
            return Ok(identity(n));
        }
        if r == 0 {
            return Ok(zeros(n, n));
        }
        let mut rng = rng_for(seed, 0);
        let w = haar_unitary(n, &mut rng);
        let s = n - r;
        let mut b = CMatrix::from_fn(r, s, |_, _| disk_point(&mut rng, self.corner_scale));
        for j in 0..self.zero_corner_cols.min(s) {
            b.column_mut(j).fill(c(0.0, 0.0));
        }
        let norm = crate::numcore::spectral_norm(&b);
        if norm > MAX_CORNER_NORM {
            b *= c(MAX_CORNER_NORM / norm, 0.0);
        }
        let canonical = block2x2(&identity(r), &b, &zeros(s, r), &zeros(s, s));
        Ok(&w * canonical * w.adjoint())
    }
}

pub fn random_idempotent(n: usize, r: usize, corner_scale: f64, seed: u64) -> Result<CMatrix> {
    IdempotentGenerator::new(n, r, corner_scale).sample(seed)
}

/// Random symmetry on the subspace spanned by the orthonormal columns of
/// `basis`, returned in those coordinates (`k x k` for `k` columns).
pub fn random_symmetry_on(basis: &CMatrix, seed: u64) -> Result<CMatrix> {
    let mut rng = rng_for(seed, 0);
    random_symmetry_on_with(basis, &mut rng)
}

pub(crate) fn random_symmetry_on_with(basis: &CMatrix, rng: &mut impl Rng) -> Result<CMatrix> {
    ensure_finite(basis)?;
    let k = basis.ncols();
    let residual = frobenius(&(basis.adjoint() * basis - identity(k)));
    if residual > 1e-10 * (k.max(1) as f64) {
        return Err(KreinError::NotOrthonormal { residual });
    }
    Ok(random_symmetry_dim(k, rng))
}

pub(crate) fn random_symmetry_dim(k: usize, rng: &mut impl Rng) -> CMatrix {
    let q = haar_unitary(k, rng);
    let signs = DVector::from_fn(k, |_, _| {
        if rng.random_bool(0.5) {
            c(1.0, 0.0)
        } else {
            c(-1.0, 0.0)
        }
    });
    let j = &q * CMatrix::from_diagonal(&signs) * q.adjoint();
    crate::numcore::hermitian_part(&j)
}

/// Random `n x n` symmetry, unconstrained.
pub fn random_symmetry(n: usize, seed: u64) -> CMatrix {
    let mut rng = rng_for(seed, 0);
    random_symmetry_dim(n, &mut rng)
}
