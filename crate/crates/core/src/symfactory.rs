//! Symmetries adapted to an idempotent `P`.
//!
//! In the block basis `R(P) ⊕ R(P)^⊥`, with `A = I + P1 P1*` and
//! `B = I + P1* P1`, every symmetry making `P` a J-projection has the form
//!
//! ```text
//! J = [[ J1 A^{-1/2},        J1 A^{-1/2} P1 ],
//!      [ P1* A^{-1/2} J1,    J2 B^{-1/2}    ]]
//! ```
//!
//! with `J1 P1 + P1 J2 = 0`. Fixing `J1 = I` gives exactly the symmetries
//! with `JP >= 0` (constraint `P1 = -P1 J2`); fixing `J2 = I` gives exactly
//! those with `P* J P <= J` (constraint `J1 P1 + P1 = 0`).

use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::numcore::{
    c, complement_basis, eig_unchecked, frobenius, hermitian_part, identity, inv_sqrt_pd, is_symmetry,
    projection_basis, psd_check, scale_of, spectral_parts, CMatrix, PsdCheck, ToleranceConfig,
};
use crate::par;
use crate::projform::{block_form, kernel_projections, random_symmetry_dim, require_idempotent, rng_for, BlockForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryFamily {
    /// `JPJ = P*`, parameters `J1`, `J2` with `J1 P1 + P1 J2 = 0`.
    JProjection,
    /// `JP >= 0`, parameter `J2` with `P1 = -P1 J2`.
    JPositive,
    /// `P* J P <= J`, parameter `J1` with `J1 P1 + P1 = 0`.
    JContractive,
}

impl SymmetryFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::JProjection => "projection",
            Self::JPositive => "positive",
            Self::JContractive => "contractive",
        }
    }

    /// Frobenius residual of the family's commutation constraint.
    pub fn constraint_residual(self, p1: &CMatrix, j1: &CMatrix, j2: &CMatrix) -> f64 {
        match self {
            Self::JProjection => frobenius(&(j1 * p1 + p1 * j2)),
            Self::JPositive => frobenius(&(p1 + p1 * j2)),
            Self::JContractive => frobenius(&(j1 * p1 + p1)),
        }
    }

    /// Whether `j` has the family's defining property for `p`.
    pub fn admits(self, p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> bool {
        match self {
            Self::JProjection => frobenius(&(j * p * j - p.adjoint())) <= tol.residual_tol * scale_of(p),
            Self::JPositive => positivity(p, j, tol).holds,
            Self::JContractive => contractivity(p, j, tol).holds,
        }
    }
}

/// `JP >= 0` (Hermitian and positive semidefinite).
pub fn positivity(p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> PsdCheck {
    psd_check(&(j * p), tol)
}

/// `J - P* J P >= 0`.
pub fn contractivity(p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> PsdCheck {
    psd_check(&(j - p.adjoint() * j * p), tol)
}

/// Parameters of one member of a family, in block coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyParams {
    Projection { j1: CMatrix, j2: CMatrix },
    Positive { j2: CMatrix },
    Contractive { j1: CMatrix },
}

impl FamilyParams {
    pub fn family(&self) -> SymmetryFamily {
        match self {
            Self::Projection { .. } => SymmetryFamily::JProjection,
            Self::Positive { .. } => SymmetryFamily::JPositive,
            Self::Contractive { .. } => SymmetryFamily::JContractive,
        }
    }

    /// `(J1, J2)` with the fixed parameter filled in as the identity.
    pub fn pair(&self, rank: usize, corank: usize) -> (CMatrix, CMatrix) {
        match self {
            Self::Projection { j1, j2 } => (j1.clone(), j2.clone()),
            Self::Positive { j2 } => (identity(rank), j2.clone()),
            Self::Contractive { j1 } => (j1.clone(), identity(corank)),
        }
    }
}

fn check_param(m: &CMatrix, dim: usize, which: &'static str, tol: &ToleranceConfig) -> Result<()> {
    if m.shape() != (dim, dim) || !is_symmetry(m, tol)? {
        return Err(KreinError::NotSymmetryParam { which });
    }
    Ok(())
}

/// Assembles the ambient-basis symmetry for the given family parameters.
pub fn assemble_symmetry(bf: &BlockForm, params: &FamilyParams, tol: &ToleranceConfig) -> Result<CMatrix> {
    let (r, s) = (bf.rank(), bf.corank());
    let (j1, j2) = params.pair(r, s);
    check_param(&j1, r, "J1", tol)?;
    check_param(&j2, s, "J2", tol)?;
    let residual = params.family().constraint_residual(&bf.p1, &j1, &j2);
    if residual > tol.residual_tol * scale_of(&bf.p1) {
        return Err(KreinError::ConstraintViolated { residual });
    }
    Ok(assemble_unchecked(bf, &j1, &j2))
}

pub(crate) fn assemble_unchecked(bf: &BlockForm, j1: &CMatrix, j2: &CMatrix) -> CMatrix {
    let p1 = &bf.p1;
    let (r, s) = (bf.rank(), bf.corank());
    let a_is = inv_sqrt_pd(&(identity(r) + p1 * p1.adjoint()));
    let b_is = inv_sqrt_pd(&(identity(s) + p1.adjoint() * p1));
    let top_left = j1 * &a_is;
    let top_right = &top_left * p1;
    let bottom_left = p1.adjoint() * &a_is * j1;
    let bottom_right = j2 * &b_is;
    let block = crate::numcore::block2x2(&top_left, &top_right, &bottom_left, &bottom_right);
    hermitian_part(&bf.to_ambient(&block))
}

/// Orthonormal bases splitting the parameter spaces along the kernels of `P1`.
struct ParamBases {
    /// `N(P1*)` and its complement `R(P1)` inside `R(P)` coordinates.
    null_adj: CMatrix,
    range: CMatrix,
    /// `N(P1)` and its complement inside `R(P)^⊥` coordinates.
    null: CMatrix,
    corange: CMatrix,
}

impl ParamBases {
    fn new(bf: &BlockForm, tol: &ToleranceConfig) -> Result<Self> {
        let null_adj = projection_basis(&bf.null_p1_adjoint(tol)?);
        let null = projection_basis(&bf.null_p1(tol)?);
        Ok(Self {
            range: complement_basis(&null_adj),
            corange: complement_basis(&null),
            null_adj,
            null,
        })
    }
}

/// `basis S basis* + sign * comp comp*`.
fn split_symmetry(basis: &CMatrix, s: &CMatrix, comp: &CMatrix, sign: f64) -> CMatrix {
    let j = basis * s * basis.adjoint() + comp * comp.adjoint() * c(sign, 0.0);
    hermitian_part(&j)
}

/// Draws `count` admissible parameter sets for `family`.
///
/// Contractive: `J1 = S1 ⊕ (-I)` over `N(P1*) ⊕ R(P1)`. Positive:
/// `J2 = S2 ⊕ (-I)` over `N(P1) ⊕ N(P1)^⊥`. Projection: a random sign `ε`
/// with `J1 = S1 ⊕ εI` and `J2 = S2 ⊕ (-ε)I` on the same splittings. The
/// `S` blocks are random symmetries. The projection sampler covers only
/// this block-diagonal subfamily.
pub fn sample_params(
    bf: &BlockForm,
    family: SymmetryFamily,
    count: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<FamilyParams>> {
    if count == 0 {
        return Err(KreinError::BadParameter {
            name: "count",
            value: 0.0,
        });
    }
    let bases = ParamBases::new(bf, tol)?;
    let bound = tol.residual_tol * scale_of(&bf.p1);
    par::try_map_indexed(count, |i| {
        let mut rng = rng_for(seed, i as u64);
        let params = match family {
            SymmetryFamily::JContractive => {
                let s1 = random_symmetry_dim(bases.null_adj.ncols(), &mut rng);
                FamilyParams::Contractive {
                    j1: split_symmetry(&bases.null_adj, &s1, &bases.range, -1.0),
                }
            }
            SymmetryFamily::JPositive => {
                let s2 = random_symmetry_dim(bases.null.ncols(), &mut rng);
                FamilyParams::Positive {
                    j2: split_symmetry(&bases.null, &s2, &bases.corange, -1.0),
                }
            }
            SymmetryFamily::JProjection => {
                let eps = if rand::Rng::random_bool(&mut rng, 0.5) {
                    1.0
                } else {
                    -1.0
                };
                let s1 = random_symmetry_dim(bases.null_adj.ncols(), &mut rng);
                let s2 = random_symmetry_dim(bases.null.ncols(), &mut rng);
                FamilyParams::Projection {
                    j1: split_symmetry(&bases.null_adj, &s1, &bases.range, eps),
                    j2: split_symmetry(&bases.null, &s2, &bases.corange, -eps),
                }
            }
        };
        let (j1, j2) = params.pair(bf.rank(), bf.corank());
        let residual = family.constraint_residual(&bf.p1, &j1, &j2);
        if residual > bound {
            return Err(KreinError::ConstraintViolated { residual });
        }
        Ok(params)
    })
}

/// Draws and assembles `count` admissible symmetries (ambient basis).
pub fn sample_symmetries(
    bf: &BlockForm,
    family: SymmetryFamily,
    count: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<CMatrix>> {
    let params = sample_params(bf, family, count, seed, tol)?;
    par::try_map_indexed(params.len(), |i| assemble_symmetry(bf, &params[i], tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremalKind {
    /// Least symmetry with `JP >= 0`: `2 P_{A+} - I`.
    PosMin,
    /// Greatest symmetry with `JP >= 0`: `2 P_{A+} - I + 2 P_{N(A)}`.
    PosMax,
    /// Least symmetry with `P* J P <= J`: `2 P_{A-} - I + 2 P_{N(A)}`.
    ContrMin,
    /// Greatest symmetry with `P* J P <= J`: `2 P_{A-} - I + 2 P_{N(P - P*)}`.
    ContrMax,
}

impl ExtremalKind {
    pub const ALL: [ExtremalKind; 4] = [
        ExtremalKind::PosMin,
        ExtremalKind::PosMax,
        ExtremalKind::ContrMin,
        ExtremalKind::ContrMax,
    ];

    pub fn family(self) -> SymmetryFamily {
        match self {
            Self::PosMin | Self::PosMax => SymmetryFamily::JPositive,
            Self::ContrMin | Self::ContrMax => SymmetryFamily::JContractive,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PosMin => "pos-min",
            Self::PosMax => "pos-max",
            Self::ContrMin => "contr-min",
            Self::ContrMax => "contr-max",
        }
    }
}

/// All four extremal symmetries, computed from the spectral projections of
/// `A = P + P*` and the kernel of `P - P*`.
#[derive(Debug, Clone)]
pub struct ExtremalSet {
    pub pos_min: CMatrix,
    pub pos_max: CMatrix,
    pub contr_min: CMatrix,
    pub contr_max: CMatrix,
}

impl ExtremalSet {
    pub fn get(&self, kind: ExtremalKind) -> &CMatrix {
        match kind {
            ExtremalKind::PosMin => &self.pos_min,
            ExtremalKind::PosMax => &self.pos_max,
            ExtremalKind::ContrMin => &self.contr_min,
            ExtremalKind::ContrMax => &self.contr_max,
        }
    }
}

pub fn extremal_symmetries(p: &CMatrix, tol: &ToleranceConfig) -> Result<ExtremalSet> {
    require_idempotent(p, tol)?;
    let n = p.nrows();
    let sp = spectral_parts(&(p + p.adjoint()), tol)?;
    let kp = kernel_projections(p, tol)?;
    let two = c(2.0, 0.0);
    let i = identity(n);
    let base_pos = &sp.p_plus * two - &i;
    let base_contr = &sp.p_minus * two - &i;
    Ok(ExtremalSet {
        pos_max: hermitian_part(&(&base_pos + &kp.p_ker_sum * two)),
        pos_min: hermitian_part(&base_pos),
        contr_min: hermitian_part(&(&base_contr + &kp.p_ker_sum * two)),
        contr_max: hermitian_part(&(&base_contr + &kp.p_ker_diff * two)),
    })
}

pub fn extremal_symmetry(p: &CMatrix, kind: ExtremalKind, tol: &ToleranceConfig) -> Result<CMatrix> {
    Ok(extremal_symmetries(p, tol)?.get(kind).clone())
}

/// The same extremal symmetry assembled from its block parameters
/// (`J2 = -I` or `2 P_{N(P1)} - I`; `J1 = -I` or `2 P_{N(P1*)} - I`).
pub fn extremal_symmetry_block(bf: &BlockForm, kind: ExtremalKind, tol: &ToleranceConfig) -> Result<CMatrix> {
    let (r, s) = (bf.rank(), bf.corank());
    let two = c(2.0, 0.0);
    let params = match kind {
        ExtremalKind::PosMin => FamilyParams::Positive { j2: -identity(s) },
        ExtremalKind::PosMax => FamilyParams::Positive {
            j2: bf.null_p1(tol)? * two - identity(s),
        },
        ExtremalKind::ContrMin => FamilyParams::Contractive { j1: -identity(r) },
        ExtremalKind::ContrMax => FamilyParams::Contractive {
            j1: bf.null_p1_adjoint(tol)? * two - identity(r),
        },
    };
    assemble_symmetry(bf, &params, tol)
}

/// Outcome of the sign-function route to the greatest J-positive symmetry.
#[derive(Debug, Clone)]
pub struct SignFormula {
    /// `(P+P*-I)|P+P*-I|^{-1} + 2 P_{N(P+P*)}`.
    pub symmetry: CMatrix,
    /// `(P+P*-I)|P+P*-I|^{-1}`.
    pub sign: CMatrix,
    /// Smallest eigenvalue magnitude of `P + P* - I`.
    pub shift_gap: f64,
    /// `||symmetry - pos_max||_F`.
    pub pos_max_gap: f64,
    /// `||sign * P_N + P_N||_F` with `P_N = P_{N(P+P*)}`.
    pub kernel_residual: f64,
}

pub fn sign_formula_symmetry(p: &CMatrix, tol: &ToleranceConfig) -> Result<SignFormula> {
    require_idempotent(p, tol)?;
    let n = p.nrows();
    let shift = p + p.adjoint() - identity(n);
    let eig = eig_unchecked(&shift);
    let shift_gap = eig.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let shift_gap = if n == 0 { 1.0 } else { shift_gap };
    if shift_gap <= tol.rank_tol * eig.scale() {
        return Err(KreinError::SingularShift { lambda_min: shift_gap });
    }
    // |M|^{-1} = (M^2)^{-1/2}, deliberately not read off the eigenvalue signs.
    let sign = hermitian_part(&(&shift * inv_sqrt_pd(&(&shift * &shift))));
    let set = extremal_symmetries(p, tol)?;
    let kp = kernel_projections(p, tol)?;
    let symmetry = hermitian_part(&(&sign + &kp.p_ker_sum * c(2.0, 0.0)));
    let pos_max_gap = frobenius(&(&symmetry - &set.pos_max));
    let kernel_residual = frobenius(&(&sign * &kp.p_ker_sum + &kp.p_ker_sum));
    let bound = tol.residual_tol * scale_of(p);
    if pos_max_gap > bound {
        return Err(KreinError::InternalMismatch {
            what: "sign formula vs greatest J-positive symmetry",
            residual: pos_max_gap,
        });
    }
    if kernel_residual > bound {
        return Err(KreinError::InternalMismatch {
            what: "sign of P + P* - I on N(P + P*)",
            residual: kernel_residual,
        });
    }
    Ok(SignFormula {
        symmetry,
        sign,
        shift_gap,
        pos_max_gap,
        kernel_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dominance {
    /// Difference is zero within tolerance.
    Equal,
    /// `j_a >= j_b`.
    Psd,
    /// `j_a <= j_b`.
    Nsd,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub min_eig: f64,
    pub max_eig: f64,
    pub verdict: Dominance,
    pub p1_norm: f64,
    /// `P` is an orthogonal projection (`||P1|| <= rank_tol`).
    pub orthogonal: bool,
}

/// Two J-projection symmetries with parameters `(-I, I)` and `(I, -I)`
/// that no symmetry of the family dominates unless `P = P*`.
#[derive(Debug, Clone)]
pub struct Witnesses {
    pub j_a: CMatrix,
    pub j_b: CMatrix,
    pub report: DominanceReport,
}

pub fn nonexistence_witnesses(p: &CMatrix, tol: &ToleranceConfig) -> Result<Witnesses> {
    let bf = block_form(p, tol)?;
    let (r, s) = (bf.rank(), bf.corank());
    let j_a = assemble_symmetry(
        &bf,
        &FamilyParams::Projection {
            j1: -identity(r),
            j2: identity(s),
        },
        tol,
    )?;
    let j_b = assemble_symmetry(
        &bf,
        &FamilyParams::Projection {
            j1: identity(r),
            j2: -identity(s),
        },
        tol,
    )?;
    let eig = eig_unchecked(&(&j_a - &j_b));
    let min_eig = eig.min_value();
    let max_eig = eig.values.first().copied().unwrap_or(0.0);
    let band = tol.psd_tol * eig.scale();
    let verdict = match (min_eig >= -band, max_eig <= band) {
        (true, true) => Dominance::Equal,
        (true, false) => Dominance::Psd,
        (false, true) => Dominance::Nsd,
        (false, false) => Dominance::Indefinite,
    };
    let p1_norm = crate::numcore::spectral_norm(&bf.p1);
    Ok(Witnesses {
        j_a,
        j_b,
        report: DominanceReport {
            min_eig,
            max_eig,
            verdict,
            p1_norm,
            orthogonal: p1_norm <= tol.rank_tol,
        },
    })
}
