//! Structural decompositions built on the block form of an idempotent:
//! the closed form of `P_{S-}` for `S = [[I, B], [B*, 0]]`, parameter
//! recovery from a J-projection symmetry, the contractive/expansive and
//! positive/negative splittings, and unitaries intertwining `P`, `P*` and
//! `I - P`.

use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::numcore::{
    block2x2, c, eig_unchecked, frobenius, hermitian_part, identity, inv_sqrt_pd, is_symmetry, polar, psd_check,
    scale_of, singular_values, spectral_parts, sqrt_psd, zeros, CMatrix, PsdCheck, ToleranceConfig,
};
use crate::projform::{block_form, kernel_projections, require_idempotent, BlockForm};
use crate::symfactory::{assemble_unchecked, contractivity};
use crate::verify::CheckResult;

/// `[[I, B], [B*, 0]]`.
pub fn shifted_block(b: &CMatrix) -> CMatrix {
    let (m, k) = b.shape();
    block2x2(&identity(m), b, &b.adjoint(), &zeros(k, k))
}

/// Closed form of the projection onto the negative spectral subspace of
/// `S = [[I, B], [B*, 0]]`:
///
/// ```text
/// [[ (I - T^{-1})/2,   -T^{-1} B           ],
///  [ -B* T^{-1},       V (I + T^{-1}) V*/2 ]]
/// ```
///
/// with `T = (I + 4 B B*)^{1/2}` and `V` the partial isometry of `B* = V |B*|`.
pub fn negative_part_projection_unchecked(b: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    crate::numcore::ensure_finite(b)?;
    let (m, k) = b.shape();
    let t_sq = identity(m) + b * b.adjoint() * c(4.0, 0.0);
    let t_inv = inv_sqrt_pd(&t_sq);
    let v = polar(&b.adjoint(), tol)?.v;
    let half = c(0.5, 0.0);
    let top_left = (identity(m) - &t_inv) * half;
    let top_right = -(&t_inv * b);
    let bottom_left = -(b.adjoint() * &t_inv);
    let bottom_right = &v * (identity(m) + &t_inv) * v.adjoint() * half;
    debug_assert_eq!(bottom_right.shape(), (k, k));
    Ok(hermitian_part(&block2x2(
        &top_left,
        &top_right,
        &bottom_left,
        &bottom_right,
    )))
}

/// Closed-form `P_{S-}`, checked against the eigendecomposition of `S`.
pub fn negative_part_projection_formula(b: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    let formula = negative_part_projection_unchecked(b, tol)?;
    let s = shifted_block(b);
    let oracle = spectral_parts(&s, tol)?.p_minus;
    let gap = frobenius(&(&formula - &oracle));
    if gap > tol.residual_tol * scale_of(&s) {
        return Err(KreinError::InternalMismatch {
            what: "closed-form negative projection vs spectral oracle",
            residual: gap,
        });
    }
    Ok(formula)
}

fn require_symmetry(j: &CMatrix, tol: &ToleranceConfig) -> Result<()> {
    if j.shape() == (j.nrows(), j.nrows()) && is_symmetry(j, tol)? {
        Ok(())
    } else {
        Err(KreinError::NotSymmetry)
    }
}

/// `||JPJ - P*||_F`.
pub fn j_projection_residual(p: &CMatrix, j: &CMatrix) -> f64 {
    frobenius(&(j * p * j - p.adjoint()))
}

fn require_j_projection(p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> Result<()> {
    require_idempotent(p, tol)?;
    crate::numcore::ensure_same_shape(p, j)?;
    require_symmetry(j, tol)?;
    let residual = j_projection_residual(p, j);
    if residual > tol.residual_tol * scale_of(p) {
        return Err(KreinError::NotJProjection { residual });
    }
    Ok(())
}

/// Parameters `(J1, J2)` of a J-projection symmetry together with the block form they refer to.
#[derive(Debug, Clone)]
pub struct ExtractedParams {
    pub block_form: BlockForm,
    pub j1: CMatrix,
    pub j2: CMatrix,
}

/// `X (X^2)^{-1/2}` for a Hermitian block `X`.
fn normalize_block(x: &CMatrix, which: &'static str, tol: &ToleranceConfig) -> Result<CMatrix> {
    if x.is_empty() {
        return Ok(x.clone());
    }
    let sq = x * x;
    let eig = eig_unchecked(&sq);
    if eig.min_value() <= tol.rank_tol * eig.scale() {
        return Err(KreinError::SingularBlock { which });
    }
    Ok(hermitian_part(&(x * eig.apply(|l| 1.0 / l.sqrt()))))
}

/// Recovers `(J1, J2)` from the diagonal blocks `J11`, `J22` of `J` by
/// `J1 = J11 (J11^2)^{-1/2}` and likewise for `J2`, then verifies that
/// reassembling reproduces `J`.
pub fn extract_params(p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> Result<ExtractedParams> {
    require_j_projection(p, j, tol)?;
    let bf = block_form(p, tol)?;
    let (r, s) = (bf.rank(), bf.corank());
    let jb = bf.to_block(j);
    let j11 = hermitian_part(&jb.view((0, 0), (r, r)).into_owned());
    let j22 = hermitian_part(&jb.view((r, r), (s, s)).into_owned());
    let j1 = normalize_block(&j11, "J11", tol)?;
    let j2 = normalize_block(&j22, "J22", tol)?;
    let rebuilt = assemble_unchecked(&bf, &j1, &j2);
    let gap = frobenius(&(&rebuilt - j));
    if gap > tol.residual_tol * scale_of(p) {
        return Err(KreinError::InternalMismatch {
            what: "reassembled symmetry",
            residual: gap,
        });
    }
    Ok(ExtractedParams { block_form: bf, j1, j2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitKind {
    /// `P = E1 E2` with `E1` J-contractive, `E2` J-expansive.
    ContractiveExpansive,
    /// `P = Q + R` with `Q` J-positive, `R` J-negative.
    PositiveNegative,
}

#[derive(Debug, Clone)]
pub struct SplitResult {
    pub e1: CMatrix,
    pub e2: CMatrix,
    pub kind: SplitKind,
}

impl SplitResult {
    /// Named Frobenius residuals of the algebraic identities of the split.
    pub fn identity_residuals(&self, p: &CMatrix) -> Vec<(&'static str, f64)> {
        let (e1, e2) = (&self.e1, &self.e2);
        let n = p.nrows();
        let i = identity(n);
        let e2a = e2.adjoint();
        let mut out = vec![
            ("e1_idempotent", frobenius(&(e1 * e1 - e1))),
            ("e2_idempotent", frobenius(&(e2 * e2 - e2))),
        ];
        match self.kind {
            SplitKind::ContractiveExpansive => {
                let sum = e1 + e2 - &i;
                let sum_adj = e1 + &e2a - &i;
                out.extend([
                    ("p_eq_e1e2", frobenius(&(e1 * e2 - p))),
                    ("p_eq_e2e1", frobenius(&(e2 * e1 - p))),
                    ("p_eq_e1_plus_e2_minus_i", frobenius(&(&sum - p))),
                    ("e1e2adj_eq_e1_plus_e2adj_minus_i", frobenius(&(e1 * &e2a - &sum_adj))),
                    ("e2adje1_eq_e1_plus_e2adj_minus_i", frobenius(&(&e2a * e1 - &sum_adj))),
                ]);
            }
            SplitKind::PositiveNegative => {
                out.extend([
                    ("q_plus_r_eq_p", frobenius(&(e1 + e2 - p))),
                    ("qr_zero", frobenius(&(e1 * e2))),
                    ("rq_zero", frobenius(&(e2 * e1))),
                    ("qradj_zero", frobenius(&(e1 * &e2a))),
                    ("radjq_zero", frobenius(&(&e2a * e1))),
                ]);
            }
        }
        out
    }

    /// Named semidefiniteness checks certifying the J-classification of each part.
    pub fn sign_checks(&self, j: &CMatrix, tol: &ToleranceConfig) -> Vec<(&'static str, PsdCheck)> {
        let n = j.nrows();
        let i = identity(n);
        match self.kind {
            SplitKind::ContractiveExpansive => vec![
                ("j_i_minus_e1_psd", psd_check(&(j * (&i - &self.e1)), tol)),
                ("j_i_minus_e2_nsd", psd_check(&-(j * (&i - &self.e2)), tol)),
                ("e1_contractive", contractivity(&self.e1, j, tol)),
                ("e2_expansive", psd_check(&(self.e2.adjoint() * j * &self.e2 - j), tol)),
            ],
            SplitKind::PositiveNegative => vec![
                ("jq_psd", psd_check(&(j * &self.e1), tol)),
                ("jr_nsd", psd_check(&-(j * &self.e2), tol)),
            ],
        }
    }
}

/// `E1 = [[I, P1 (I+J2)/2], [0, (I-J2)/2]]`, `E2 = [[I, P1 (I-J2)/2], [0, (I+J2)/2]]`
/// in the block basis of `P`.
pub fn contractive_expansive_split(p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> Result<SplitResult> {
    let params = extract_params(p, j, tol)?;
    let bf = &params.block_form;
    let (r, s) = (bf.rank(), bf.corank());
    let half = c(0.5, 0.0);
    let plus = (identity(s) + &params.j2) * half;
    let minus = (identity(s) - &params.j2) * half;
    let e1 = block2x2(&identity(r), &(&bf.p1 * &plus), &zeros(s, r), &minus);
    let e2 = block2x2(&identity(r), &(&bf.p1 * &minus), &zeros(s, r), &plus);
    Ok(SplitResult {
        e1: bf.to_ambient(&e1),
        e2: bf.to_ambient(&e2),
        kind: SplitKind::ContractiveExpansive,
    })
}

/// `Q = I - E1'`, `R = I - E2'` where `(E1', E2')` splits the J-projection `I - P`.
pub fn positive_negative_split(p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> Result<SplitResult> {
    require_j_projection(p, j, tol)?;
    let i = identity(p.nrows());
    let complement = contractive_expansive_split(&(&i - p), j, tol)?;
    Ok(SplitResult {
        e1: &i - complement.e1,
        e2: &i - complement.e2,
        kind: SplitKind::PositiveNegative,
    })
}

/// Unitaries `u1: R(P)^⊥ -> R(I-P)` and `v1: R(I-P)^⊥ -> R(P)` with
/// `Q1 = u1 P1* v1`, where `Q1` is the corner block of `I - P`.
#[derive(Debug, Clone)]
pub struct Intertwiners {
    pub u1: CMatrix,
    pub v1: CMatrix,
    pub p1: CMatrix,
    pub q1: CMatrix,
    /// `||Q1 - u1 P1* v1||_F`.
    pub residual: f64,
    pub form_p: BlockForm,
    pub form_q: BlockForm,
}

fn invertible_polar(m: &CMatrix, which: &'static str, tol: &ToleranceConfig) -> Result<CMatrix> {
    if m.is_empty() {
        return Ok(m.clone());
    }
    let sigma_min = singular_values(m).last().copied().unwrap_or(0.0);
    if sigma_min <= tol.rank_tol * scale_of(m) {
        return Err(KreinError::DegenerateBlock { which, sigma_min });
    }
    Ok(polar(m, tol)?.v)
}

/// Builds the intertwiners from the basis change `U~ = W_q* W_p` between the
/// block bases of `P` and `I - P`: `U21 = U |U21|`, `U12 = V |U12|`, then
/// `u1 = V`, `v1 = U*`.
pub fn intertwining_unitaries(p: &CMatrix, tol: &ToleranceConfig) -> Result<Intertwiners> {
    require_idempotent(p, tol)?;
    let n = p.nrows();
    let form_p = block_form(p, tol)?;
    let form_q = block_form(&(identity(n) - p), tol)?;
    let (r, rq) = (form_p.rank(), form_q.rank());
    if r + rq != n {
        return Err(KreinError::InternalMismatch {
            what: "rank(P) + rank(I - P) = n",
            residual: (r + rq) as f64 - n as f64,
        });
    }
    let basis_change = form_q.unitary().adjoint() * form_p.unitary();
    let u21 = basis_change.view((rq, 0), (r, r)).into_owned();
    let u12 = basis_change.view((0, r), (rq, n - r)).into_owned();
    let u = invertible_polar(&u21, "U21", tol)?;
    let v = invertible_polar(&u12, "U12", tol)?;
    let u1 = v;
    let v1 = u.adjoint();
    let p1 = form_p.p1.clone();
    let q1 = form_q.p1.clone();
    let residual = frobenius(&(&q1 - &u1 * p1.adjoint() * &v1));
    Ok(Intertwiners {
        u1,
        v1,
        p1,
        q1,
        residual,
        form_p,
        form_q,
    })
}

/// A unitary `U` with `U* P* U = P`, and `||U* P* U - P||_F`.
#[derive(Debug, Clone)]
pub struct AdjointSimilarity {
    pub u: CMatrix,
    pub residual: f64,
}

/// `U = [[0, -u1], [v1*, 0]]` from `R(P) ⊕ R(P)^⊥` to `R(I-P) ⊕ R(I-P)^⊥`.
pub fn adjoint_similarity(p: &CMatrix, tol: &ToleranceConfig) -> Result<AdjointSimilarity> {
    let tw = intertwining_unitaries(p, tol)?;
    let (r, rq) = (tw.form_p.rank(), tw.form_q.rank());
    let coords = block2x2(&zeros(rq, r), &-&tw.u1, &tw.v1.adjoint(), &zeros(r, rq));
    let u = tw.form_q.unitary() * coords * tw.form_p.unitary().adjoint();
    let residual = frobenius(&(u.adjoint() * p.adjoint() * &u - p));
    Ok(AdjointSimilarity { u, residual })
}

#[derive(Debug, Clone)]
pub struct HermitianEquivalence {
    pub u_tilde: CMatrix,
    /// `||U~* L U~ - R||_F`.
    pub residual: f64,
    /// Largest gap between the sorted spectra of the two sides.
    pub spectrum_gap: f64,
}

/// `P + P* + 2(I - P_{R(P)})` is unitarily equivalent to
/// `2I - P - P* + 2(I - P_{R(I-P)})` through `U~ = [[0, v1], [u1*, 0]]`.
pub fn complement_equivalence(p: &CMatrix, tol: &ToleranceConfig) -> Result<HermitianEquivalence> {
    let tw = intertwining_unitaries(p, tol)?;
    let n = p.nrows();
    let (r, rq) = (tw.form_p.rank(), tw.form_q.rank());
    let coords = block2x2(&zeros(r, rq), &tw.v1, &tw.u1.adjoint(), &zeros(rq, r));
    let u_tilde = tw.form_p.unitary() * coords * tw.form_q.unitary().adjoint();
    let i = identity(n);
    let two = c(2.0, 0.0);
    let range_p = &tw.form_p.basis_range * tw.form_p.basis_range.adjoint();
    let range_q = &tw.form_q.basis_range * tw.form_q.basis_range.adjoint();
    let lhs = p + p.adjoint() + (&i - range_p) * two;
    let rhs = &i * two - p - p.adjoint() + (&i - range_q) * two;
    let residual = frobenius(&(u_tilde.adjoint() * &lhs * &u_tilde - &rhs));
    let spec_l = eig_unchecked(&lhs).values;
    let spec_r = eig_unchecked(&rhs).values;
    let spectrum_gap = spec_l
        .iter()
        .zip(&spec_r)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(HermitianEquivalence {
        u_tilde,
        residual,
        spectrum_gap,
    })
}

pub mod refs {
    pub const RANGE_PLUS_COMPLEMENT: &str = "P_(2I-P-P*)+ = P_(P+P*)- + P_N(P+P*)";
    pub const KERNEL_CORNERS: &str = "P_N(P1*) = P_N(Q1), P_N(P1) = P_N(Q1*)";
    pub const RANGE_MINUS_COMPLEMENT: &str = "P_(2I-P-P*)- + P_N(2I-P-P*) = P_(P+P*)+";
    pub const MAX_CONTRACTIVE_COMPLEMENT: &str = "P_(2I-P-P*)+ + P_N(2I-P-P*) = P_(P+P*)- + P_N(P-P*)";
    pub const KERNEL_DIFFERENCE: &str = "P_N(2I-P-P*) = P_N(P-P*) - P_N(P+P*)";
}

/// Identities between the spectral projections of `P + P*` and `2I - P - P*`.
pub fn range_projection_identities(p: &CMatrix, tol: &ToleranceConfig) -> Result<Vec<CheckResult>> {
    require_idempotent(p, tol)?;
    let n = p.nrows();
    let sum = p + p.adjoint();
    let comp = identity(n) * c(2.0, 0.0) - &sum;
    let sp_sum = spectral_parts(&sum, tol)?;
    let sp_comp = spectral_parts(&comp, tol)?;
    let kp = kernel_projections(p, tol)?;
    let fp = block_form(p, tol)?;
    let fq = block_form(&(identity(n) - p), tol)?;
    let bound = tol.residual_tol * scale_of(p);

    let kernel_adj_p1 = fp.embed_range(&fp.null_p1_adjoint(tol)?);
    let kernel_q1 = fq.embed_perp(&fq.null_p1(tol)?);
    let kernel_p1 = fp.embed_perp(&fp.null_p1(tol)?);
    let kernel_adj_q1 = fq.embed_range(&fq.null_p1_adjoint(tol)?);

    let gap = |a: &CMatrix, b: &CMatrix| frobenius(&(a - b));
    Ok(vec![
        CheckResult::residual(
            "range_identities.plus_of_complement",
            refs::RANGE_PLUS_COMPLEMENT,
            gap(&sp_comp.p_plus, &(&sp_sum.p_minus + &sp_sum.p_ker)),
            bound,
        ),
        CheckResult::residual(
            "range_identities.kernel_corners",
            refs::KERNEL_CORNERS,
            gap(&kernel_adj_p1, &kernel_q1).max(gap(&kernel_p1, &kernel_adj_q1)),
            bound,
        ),
        CheckResult::residual(
            "range_identities.minus_of_complement",
            refs::RANGE_MINUS_COMPLEMENT,
            gap(&(&sp_comp.p_minus + &sp_comp.p_ker), &sp_sum.p_plus),
            bound,
        ),
        CheckResult::residual(
            "range_identities.max_contractive_complement",
            refs::MAX_CONTRACTIVE_COMPLEMENT,
            gap(&(&sp_comp.p_plus + &sp_comp.p_ker), &(&sp_sum.p_minus + &kp.p_ker_diff)),
            bound,
        ),
        CheckResult::residual(
            "range_identities.kernel_difference",
            refs::KERNEL_DIFFERENCE,
            gap(&sp_comp.p_ker, &(&kp.p_ker_diff - &sp_sum.p_ker)),
            bound,
        ),
    ])
}

/// `(I + 4 B B*)^{1/2}`, exposed for callers that want `T` itself.
pub fn shifted_root(b: &CMatrix) -> CMatrix {
    sqrt_psd(&(identity(b.nrows()) + b * b.adjoint() * c(4.0, 0.0)))
}
