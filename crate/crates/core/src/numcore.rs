//! Dense complex kernels: Hermitian eigendecomposition, spectral parts,
//! range projections, polar decomposition and Loewner comparison.
//!
//! Every routine measures its tolerances against
//! `scale = max(1, spectral norm of the input)`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Numerical policy threaded through every operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Eigen/singular values with magnitude at most `rank_tol * scale` count as zero.
    pub rank_tol: f64,
    /// `A >= 0` is accepted when `lambda_min(A) >= -psd_tol * scale`.
    pub psd_tol: f64,
    /// Identity checks pass when the Frobenius residual is at most `residual_tol * scale`.
    pub residual_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_tol: 1e-10,
            psd_tol: 1e-9,
            residual_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_tol: f64, psd_tol: f64, residual_tol: f64) -> Result<Self> {
        let cfg = Self {
            rank_tol,
            psd_tol,
            residual_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("rank_tol", self.rank_tol),
            ("psd_tol", self.psd_tol),
            ("residual_tol", self.residual_tol),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(KreinError::BadTolerance { name, value });
            }
        }
        Ok(())
    }
}

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a complex matrix from row-major real entries.
pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
    CMatrix::from_fn(rows, cols, |i, j| c(entries[i * cols + j], 0.0))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(KreinError::NonFinite)
    }
}

pub fn ensure_square(m: &CMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(KreinError::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        })
    }
}

pub fn ensure_same_shape(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.shape() == b.shape() {
        Ok(())
    } else {
        Err(KreinError::DimensionMismatch {
            expected: format!("{}x{}", a.nrows(), a.ncols()),
            found: format!("{}x{}", b.nrows(), b.ncols()),
        })
    }
}

/// `(A + A*) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// Singular values in descending order. Empty for degenerate shapes.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sigma = jacobi_svd(m).sigma;
    sigma.truncate(m.nrows().min(m.ncols()));
    sigma
}

/// Full singular system from one-sided (Hestenes) Jacobi rotations.
///
/// nalgebra's complex bidiagonal SVD returns inaccurate factors for some
/// rank-deficient inputs, so columns are orthogonalized directly instead.
struct JacobiSvd {
    /// `m x n`; column `k` is `u_k` for `sigma[k] > 0` and zero otherwise.
    u: CMatrix,
    /// Descending, length `n`.
    sigma: Vec<f64>,
    /// `n x n` unitary.
    v: CMatrix,
}

fn jacobi_svd(t: &CMatrix) -> JacobiSvd {
    const MAX_SWEEPS: usize = 80;
    let (m, n) = t.shape();
    let mut a = t.clone();
    let mut v = identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dotc(&a.column(j));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let tan = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cos = 1.0 / (1.0 + tan * tan).sqrt();
                let sin = cos * tan;
                let phase = (gamma / g).conj();
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let x = mat[(r, i)];
                        let y = mat[(r, j)] * phase;
                        mat[(r, i)] = x * cos - y * sin;
                        mat[(r, j)] = x * sin + y * cos;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = zeros(m, n);
    for (dst, &src) in order.iter().enumerate() {
        if norms[src] > 0.0 {
            u.set_column(dst, &(a.column(src) / c(norms[src], 0.0)));
        }
    }
    JacobiSvd {
        u,
        sigma: order.iter().map(|&k| norms[k]).collect(),
        v: v.select_columns(order.iter()),
    }
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `max(1, ||m||_2)`.
pub fn scale_of(m: &CMatrix) -> f64 {
    spectral_norm(m).max(1.0)
}

/// Eigenvalues (descending) and unitary eigenvector matrix of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self) -> f64 {
        self.spectral_norm().max(1.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `Q f(Lambda) Q*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled[(i, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Orthogonal projection onto the span of eigenvectors selected by `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        self.apply(|l| if keep(l) { 1.0 } else { 0.0 })
    }

    /// Columns of the eigenvector matrix selected by `keep`.
    pub fn basis(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let idx: Vec<usize> = (0..self.values.len()).filter(|&k| keep(self.values[k])).collect();
        self.vectors.select_columns(idx.iter())
    }
}

/// Eigendecomposition of the symmetrized input without validation.
pub(crate) fn eig_unchecked(a: &CMatrix) -> HermitianEig {
    let n = a.nrows();
    if n == 0 {
        return HermitianEig {
            values: Vec::new(),
            vectors: zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = eig.eigenvectors.select_columns(order.iter());
    HermitianEig { values, vectors }
}

pub fn hermitian_eig(a: &CMatrix, tol: &ToleranceConfig) -> Result<HermitianEig> {
    ensure_finite(a)?;
    ensure_square(a)?;
    let eig = eig_unchecked(a);
    let asymmetry = frobenius(&(a - a.adjoint()));
    let bound = tol.residual_tol * eig.scale();
    if asymmetry > bound {
        return Err(KreinError::NotHermitian {
            asymmetry,
            tolerance: bound,
        });
    }
    Ok(eig)
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    eig_unchecked(a).min_value()
}

/// Positive part, negative part and the three spectral projections of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralParts {
    pub a_plus: CMatrix,
    pub a_minus: CMatrix,
    pub p_plus: CMatrix,
    pub p_minus: CMatrix,
    pub p_ker: CMatrix,
}

pub fn spectral_parts(a: &CMatrix, tol: &ToleranceConfig) -> Result<SpectralParts> {
    let eig = hermitian_eig(a, tol)?;
    Ok(spectral_parts_from(&eig, tol))
}

pub(crate) fn spectral_parts_from(eig: &HermitianEig, tol: &ToleranceConfig) -> SpectralParts {
    let cut = tol.rank_tol * eig.scale();
    SpectralParts {
        a_plus: eig.apply(|l| if l >= cut { l } else { 0.0 }),
        a_minus: eig.apply(|l| if l <= -cut { -l } else { 0.0 }),
        p_plus: eig.projector(|l| l >= cut),
        p_minus: eig.projector(|l| l <= -cut),
        p_ker: eig.projector(|l| l.abs() < cut),
    }
}

/// Compact SVD restricted to singular values above the rank cutoff.
struct CompactSvd {
    u: CMatrix,
    sigma: Vec<f64>,
    v: CMatrix,
    /// All singular values and right vectors, for the modulus.
    sigma_all: Vec<f64>,
    v_all: CMatrix,
}

fn compact_svd(t: &CMatrix, tol: &ToleranceConfig) -> CompactSvd {
    let (m, n) = t.shape();
    if t.is_empty() {
        return CompactSvd {
            u: zeros(m, 0),
            sigma: Vec::new(),
            v: zeros(n, 0),
            sigma_all: Vec::new(),
            v_all: zeros(n, 0),
        };
    }
    let svd = jacobi_svd(t);
    let sigma_all = svd.sigma;
    let u_all = svd.u;
    let v_all = svd.v;
    let cut = tol.rank_tol * sigma_all.first().copied().unwrap_or(0.0).max(1.0);
    let r = sigma_all.iter().take_while(|&&s| s > cut).count();
    CompactSvd {
        u: u_all.columns(0, r).into_owned(),
        sigma: sigma_all[..r].to_vec(),
        v: v_all.columns(0, r).into_owned(),
        sigma_all,
        v_all,
    }
}

/// Numerical rank at `rank_tol`.
pub fn numerical_rank(t: &CMatrix, tol: &ToleranceConfig) -> Result<usize> {
    ensure_finite(t)?;
    Ok(compact_svd(t, tol).sigma.len())
}

/// Orthonormal basis of the closure of the range of `t`.
pub fn range_basis(t: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    ensure_finite(t)?;
    Ok(compact_svd(t, tol).u)
}

/// Orthogonal projection onto the closure of the range of `t`.
pub fn range_projection(t: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    let u = range_basis(t, tol)?;
    Ok(&u * u.adjoint())
}

/// Orthogonal projection onto the null space of `t`.
pub fn null_projection(t: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    ensure_finite(t)?;
    let v = compact_svd(t, tol).v;
    Ok(identity(t.ncols()) - &v * v.adjoint())
}

/// Orthonormal basis of the range of an orthogonal projection.
pub fn projection_basis(p: &CMatrix) -> CMatrix {
    eig_unchecked(p).basis(|l| l > 0.5)
}

/// Orthonormal completion: a basis of the orthogonal complement of the columns of `basis`.
pub fn complement_basis(basis: &CMatrix) -> CMatrix {
    let n = basis.nrows();
    projection_basis(&(identity(n) - basis * basis.adjoint()))
}

/// `T = V |T|` with `N(V) = N(T)`.
#[derive(Debug, Clone)]
pub struct PolarParts {
    pub v: CMatrix,
    pub modulus: CMatrix,
}

pub fn polar(t: &CMatrix, tol: &ToleranceConfig) -> Result<PolarParts> {
    ensure_finite(t)?;
    let svd = compact_svd(t, tol);
    let v = &svd.u * svd.v.adjoint();
    let mut weighted = svd.v_all.clone();
    for (k, &s) in svd.sigma_all.iter().enumerate() {
        weighted.column_mut(k).scale_mut(s);
    }
    let modulus = weighted * svd.v_all.adjoint();
    Ok(PolarParts { v, modulus })
}

/// `(verdict, margin)` with `margin = lambda_min(a - b)`.
pub fn loewner_geq(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<(bool, f64)> {
    ensure_finite(a)?;
    ensure_finite(b)?;
    ensure_square(a)?;
    ensure_same_shape(a, b)?;
    let ea = hermitian_eig(a, tol)?;
    let eb = hermitian_eig(b, tol)?;
    let scale = ea.scale().max(eb.scale());
    let margin = min_eigenvalue(&(a - b));
    Ok((margin >= -tol.psd_tol * scale, margin))
}

/// Positive-semidefiniteness of a matrix that is expected to be Hermitian.
///
/// The matrix is not symmetrized: `asymmetry` must itself be within
/// `residual_tol * scale` for `holds` to be true.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub asymmetry: f64,
    pub margin: f64,
    pub scale: f64,
    pub holds: bool,
}

impl PsdCheck {
    pub fn residual_bound(&self, tol: &ToleranceConfig) -> f64 {
        tol.residual_tol * self.scale
    }

    pub fn psd_bound(&self, tol: &ToleranceConfig) -> f64 {
        tol.psd_tol * self.scale
    }
}

pub fn psd_check(m: &CMatrix, tol: &ToleranceConfig) -> PsdCheck {
    let eig = eig_unchecked(m);
    let scale = eig.scale();
    let asymmetry = frobenius(&(m - m.adjoint()));
    let margin = eig.min_value();
    PsdCheck {
        asymmetry,
        margin,
        scale,
        holds: asymmetry <= tol.residual_tol * scale && margin >= -tol.psd_tol * scale,
    }
}

pub fn is_symmetry(j: &CMatrix, tol: &ToleranceConfig) -> Result<bool> {
    ensure_square(j)?;
    if !is_finite(j) {
        return Ok(false);
    }
    let bound = tol.residual_tol * scale_of(j);
    let n = j.nrows();
    let herm = frobenius(&(j - j.adjoint()));
    let inv = frobenius(&(j * j - identity(n)));
    Ok(herm <= bound && inv <= bound)
}

/// `A^{1/2}` of a positive semidefinite matrix (negative roundoff clipped).
pub fn sqrt_psd(a: &CMatrix) -> CMatrix {
    eig_unchecked(a).apply(|l| l.max(0.0).sqrt())
}

/// `A^{-1/2}` of a Hermitian positive definite matrix.
pub fn inv_sqrt_pd(a: &CMatrix) -> CMatrix {
    eig_unchecked(a).apply(|l| 1.0 / l.sqrt())
}

/// Moore-Penrose pseudoinverse of a Hermitian matrix on its numerical support.
pub fn pinv_hermitian(a: &CMatrix, tol: &ToleranceConfig) -> CMatrix {
    let eig = eig_unchecked(a);
    let cut = tol.rank_tol * eig.scale();
    eig.apply(|l| if l.abs() > cut { 1.0 / l } else { 0.0 })
}

/// Assembles `[[a, b], [c, d]]`.
pub fn block2x2(a: &CMatrix, b: &CMatrix, cc: &CMatrix, d: &CMatrix) -> CMatrix {
    let (r1, c1) = a.shape();
    let (r2, c2) = d.shape();
    debug_assert_eq!(b.shape(), (r1, c2));
    debug_assert_eq!(cc.shape(), (r2, c1));
    let mut m = zeros(r1 + r2, c1 + c2);
    m.view_mut((0, 0), (r1, c1)).copy_from(a);
    m.view_mut((0, c1), (r1, c2)).copy_from(b);
    m.view_mut((r1, 0), (r2, c1)).copy_from(cc);
    m.view_mut((r1, c1), (r2, c2)).copy_from(d);
    m
}

/// Block-diagonal `a ⊕ b`.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    block2x2(a, &zeros(a.nrows(), b.ncols()), &zeros(b.nrows(), a.ncols()), b)
}

/// `[a | b]`.
pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    debug_assert_eq!(a.nrows(), b.nrows());
    let mut m = zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}
