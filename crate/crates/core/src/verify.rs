//! Named, toleranced checks and the reports that collect them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decomp::{
    adjoint_similarity, complement_equivalence, contractive_expansive_split, intertwining_unitaries,
    j_projection_residual, negative_part_projection_unchecked, positive_negative_split, range_projection_identities,
    SplitKind, SplitResult,
};
use crate::error::{KreinError, Result};
use crate::numcore::{
    c, frobenius, identity, is_symmetry, loewner_geq, psd_check, scale_of, singular_values, spectral_parts, CMatrix,
    PsdCheck, ToleranceConfig,
};
use crate::par;
use crate::projform::{
    block_form, idempotency_residual, kernel_projections_block, kernel_projections_direct, require_idempotent,
};
use crate::symfactory::{
    contractivity, extremal_symmetries, extremal_symmetry_block, nonexistence_witnesses, positivity, sample_symmetries,
    sign_formula_symmetry, Dominance, ExtremalKind, SymmetryFamily,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// The statement being checked, written as a formula.
    pub paper_ref: String,
    pub residual: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn status_of(residual: f64, margin: f64, tolerance: f64) -> Status {
    if residual <= tolerance && margin >= -tolerance {
        Status::Pass
    } else {
        Status::Fail
    }
}

impl CheckResult {
    fn build(name: impl Into<String>, reference: &str, residual: f64, margin: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            paper_ref: reference.to_string(),
            residual,
            margin,
            tolerance,
            status: status_of(residual, margin, tolerance),
            reason: None,
        }
    }

    /// Passes when `residual <= tolerance`.
    pub fn residual(name: impl Into<String>, reference: &str, residual: f64, tolerance: f64) -> Self {
        Self::build(name, reference, residual, 0.0, tolerance)
    }

    /// Passes when `margin >= -tolerance`.
    pub fn margin(name: impl Into<String>, reference: &str, margin: f64, tolerance: f64) -> Self {
        Self::build(name, reference, 0.0, margin, tolerance)
    }

    /// A semidefiniteness check: asymmetry against `residual_tol`, smallest
    /// eigenvalue against `psd_tol`, each relative to the matrix scale.
    pub fn psd(name: impl Into<String>, reference: &str, chk: &PsdCheck, tol: &ToleranceConfig) -> Self {
        let psd_bound = chk.psd_bound(tol);
        // asymmetry is rescaled so that the single tolerance applies to both parts
        let residual = chk.asymmetry * psd_bound / chk.residual_bound(tol).max(f64::MIN_POSITIVE);
        let mut out = Self::build(name, reference, residual, chk.margin, psd_bound);
        if chk.holds != (out.status == Status::Pass) {
            out.status = if chk.holds { Status::Pass } else { Status::Fail };
        }
        out
    }

    /// Two statements that must be simultaneously true or false.
    ///
    /// The residual is zero when they agree and the larger violation otherwise.
    pub fn biconditional(name: impl Into<String>, reference: &str, left: &PsdCheck, right: &PsdCheck) -> Self {
        let residual = if left.holds == right.holds {
            0.0
        } else {
            violation(left).max(violation(right)).max(f64::MIN_POSITIVE)
        };
        Self::build(name, reference, residual, 0.0, 0.0)
    }

    /// A boolean condition.
    pub fn flag(name: impl Into<String>, reference: &str, ok: bool) -> Self {
        Self::build(name, reference, if ok { 0.0 } else { 1.0 }, 0.0, 0.0)
    }

    /// A check that raised an error.
    pub fn errored(name: impl Into<String>, reference: &str, err: &KreinError) -> Self {
        let mut out = Self::build(name, reference, f64::MAX, 0.0, 0.0);
        out.status = Status::Fail;
        out.reason = Some(err.to_string());
        out
    }

    pub fn skipped(name: impl Into<String>, reference: &str, reason: &str) -> Self {
        Self {
            name: name.into(),
            paper_ref: reference.to_string(),
            residual: 0.0,
            margin: 0.0,
            tolerance: 0.0,
            status: Status::Skipped,
            reason: Some(reason.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

fn violation(chk: &PsdCheck) -> f64 {
    chk.asymmetry.max(-chk.margin).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subject {
    pub dim: usize,
    pub rank: usize,
    pub p_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_sha256: Option<String>,
}

impl Subject {
    pub fn of(p: &CMatrix, j: Option<&CMatrix>, tol: &ToleranceConfig) -> Self {
        let rank = if p.is_empty() {
            0
        } else {
            // trace of an idempotent; falls back to numerical rank otherwise
            match require_idempotent(p, tol) {
                Ok(()) => p.trace().re.round().max(0.0) as usize,
                Err(_) => crate::numcore::numerical_rank(p, tol).unwrap_or(0),
            }
        };
        Self {
            dim: p.nrows(),
            rank,
            p_sha256: matrix_digest(p),
            j_sha256: j.map(matrix_digest),
        }
    }
}

/// SHA-256 of the shape and row-major little-endian entries.
pub fn matrix_digest(m: &CMatrix) -> String {
    let mut h = Sha256::new();
    h.update((m.nrows() as u64).to_le_bytes());
    h.update((m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for k in 0..m.ncols() {
            h.update(m[(i, k)].re.to_le_bytes());
            h.update(m[(i, k)].im.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub subject: Subject,
    pub checks: Vec<CheckResult>,
    pub config: ToleranceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(subject: Subject, config: ToleranceConfig, seed: Option<u64>) -> Self {
        Self {
            subject,
            checks: Vec::new(),
            config,
            seed,
        }
    }

    /// No check failed (skipped checks do not count against the report).
    pub fn overall_pass(&self) -> bool {
        !self.checks.iter().any(CheckResult::failed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub j_projection: bool,
    pub j_positive: bool,
    pub j_negative: bool,
    pub j_contractive: bool,
    pub j_expansive: bool,
}

pub fn classify(p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> Result<Classification> {
    crate::numcore::ensure_same_shape(p, j)?;
    if !is_symmetry(j, tol)? {
        return Err(KreinError::NotSymmetry);
    }
    require_idempotent(p, tol)?;
    Ok(Classification {
        j_projection: SymmetryFamily::JProjection.admits(p, j, tol),
        j_positive: positivity(p, j, tol).holds,
        j_negative: psd_check(&-(j * p), tol).holds,
        j_contractive: contractivity(p, j, tol).holds,
        j_expansive: psd_check(&(p.adjoint() * j * p - j), tol).holds,
    })
}

pub mod refs {
    pub const IDEMPOTENT: &str = "P^2 = P";
    pub const BLOCK_FORM: &str = "W* P W = [[I, P1], [0, 0]]";
    pub const KERNEL_SUM: &str = "N(P+P*) = 0 ⊕ N(P1)";
    pub const KERNEL_DIFF: &str = "N(P-P*) = N(P1*) ⊕ N(P1)";
    pub const NEGATIVE_PART: &str = "P_S- = [[(I-T^-1)/2, -T^-1 B], [-B* T^-1, V(I+T^-1)V*/2]], T = (I+4BB*)^(1/2)";
    pub const NEGATIVE_PART_SUM: &str = "P_(P+P*)- from the block formula with B = P1/2";
    pub const POS_MIN: &str = "min{J : JP >= 0} = 2P_(P+P*)+ - I";
    pub const POS_MAX: &str = "max{J : JP >= 0} = 2P_(P+P*)+ - I + 2P_N(P+P*)";
    pub const CONTR_MIN: &str = "min{J : P*JP <= J} = 2P_(P+P*)- - I + 2P_N(P+P*)";
    pub const CONTR_MAX: &str = "max{J : P*JP <= J} = 2P_(P+P*)- - I + 2P_N(P-P*)";
    pub const WEB: &str = "pos_min + contr_min = 0, pos_max + contr_min = 2P_N(P+P*)";
    pub const SIGN_FORMULA: &str = "max{J : JP >= 0} = sgn(P+P*-I) + 2P_N(P+P*)";
    pub const SIGN_KERNEL: &str = "sgn(P+P*-I) = -I on N(P+P*)";
    pub const CLASSIFY: &str = "P*JP <= J iff J(I-P) >= 0";
    pub const SPLIT_CE: &str = "P = E1 E2, E1 J-contractive, E2 J-expansive";
    pub const SPLIT_PN: &str = "P = Q + R, Q J-positive, R J-negative, QR = RQ = 0";
    pub const SPLIT_CONSISTENT: &str = "E1 = I - Q' for the positive part Q' of I - P";
    pub const WITNESSES: &str = "J-projection symmetries have a maximum iff P = P*";
    pub const INTERTWINING: &str = "Q1 = u1 P1* v1 with u1, v1 unitary";
    pub const ADJOINT_SIMILARITY: &str = "U* P* U = P";
    pub const EQUIVALENCE: &str = "P+P*+2(I-P_R(P)) ~ 2I-P-P*+2(I-P_R(I-P))";
}

/// `J` is J-contractive for `P` exactly when `J(I - P) >= 0`.
pub fn complement_positivity_check(p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> Result<CheckResult> {
    require_idempotent(p, tol)?;
    crate::numcore::ensure_same_shape(p, j)?;
    let complement = identity(p.nrows()) - p;
    Ok(CheckResult::biconditional(
        "classify.contractive_iff_complement_positive",
        refs::CLASSIFY,
        &contractivity(p, j, tol),
        &positivity(&complement, j, tol),
    ))
}

fn symmetry_residual(j: &CMatrix) -> f64 {
    let n = j.nrows();
    frobenius(&(j - j.adjoint())).max(frobenius(&(j * j - identity(n))))
}

fn admission_check(family: SymmetryFamily, p: &CMatrix, j: &CMatrix, tol: &ToleranceConfig) -> PsdCheck {
    match family {
        SymmetryFamily::JPositive => positivity(p, j, tol),
        _ => contractivity(p, j, tol),
    }
}

/// Samples `samples` symmetries of `family` and checks each lies between the
/// closed-form minimum and maximum.
pub fn extremality_probe(
    p: &CMatrix,
    family: SymmetryFamily,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Report> {
    if family == SymmetryFamily::JProjection {
        return Err(KreinError::BadParameter {
            name: "family",
            value: 0.0,
        });
    }
    let bf = block_form(p, tol)?;
    let set = extremal_symmetries(p, tol)?;
    let (lo_kind, hi_kind) = match family {
        SymmetryFamily::JPositive => (ExtremalKind::PosMin, ExtremalKind::PosMax),
        _ => (ExtremalKind::ContrMin, ExtremalKind::ContrMax),
    };
    let (lo, hi) = (set.get(lo_kind), set.get(hi_kind));
    let reference = match family {
        SymmetryFamily::JPositive => refs::POS_MAX,
        _ => refs::CONTR_MAX,
    };
    let prefix = format!("probe.{}", family.name());
    let mut report = Report::new(Subject::of(p, None, tol), *tol, Some(seed));
    for (tag, j) in [("min", lo), ("max", hi)] {
        report.checks.push(CheckResult::residual(
            format!("{prefix}.{tag}.symmetry"),
            reference,
            symmetry_residual(j),
            tol.residual_tol,
        ));
        report.checks.push(CheckResult::psd(
            format!("{prefix}.{tag}.admissible"),
            reference,
            &admission_check(family, p, j, tol),
            tol,
        ));
    }
    let draws = sample_symmetries(&bf, family, samples, seed, tol)?;
    let width = samples.saturating_sub(1).to_string().len().max(4);
    let per_draw = par::try_map_indexed(draws.len(), |i| {
        let j = &draws[i];
        let (_, above) = loewner_geq(j, lo, tol)?;
        let (_, below) = loewner_geq(hi, j, tol)?;
        let name = |what: &str| format!("{prefix}.draw[{i:0width$}].{what}");
        Ok(vec![
            CheckResult::margin(name("above_min"), reference, above, tol.psd_tol),
            CheckResult::psd(name("admissible"), reference, &admission_check(family, p, j, tol), tol),
            CheckResult::margin(name("below_max"), reference, below, tol.psd_tol),
        ])
    })?;
    report.checks.extend(per_draw.into_iter().flatten());
    Ok(report)
}

fn gap(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius(&(a - b))
}

fn push_result(out: &mut Vec<CheckResult>, name: &str, reference: &str, r: Result<Vec<CheckResult>>) {
    match r {
        Ok(checks) => out.extend(checks),
        Err(e) => out.push(CheckResult::errored(name, reference, &e)),
    }
}

fn structural_checks(p: &CMatrix, samples: usize, seed: u64, tol: &ToleranceConfig) -> Vec<CheckResult> {
    let bound = tol.residual_tol * scale_of(p);
    let mut out = Vec::new();

    push_result(
        &mut out,
        "block_form",
        refs::BLOCK_FORM,
        (|| {
            let bf = block_form(p, tol)?;
            let w = bf.unitary();
            let n = p.nrows();
            let direct = kernel_projections_direct(p, tol)?;
            let block = kernel_projections_block(&bf, tol)?;
            Ok(vec![
                CheckResult::residual(
                    "block_form.round_trip",
                    refs::BLOCK_FORM,
                    gap(&bf.reassemble(), p),
                    bound,
                ),
                CheckResult::residual(
                    "block_form.unitary",
                    refs::BLOCK_FORM,
                    gap(&(w.adjoint() * &w), &identity(n)),
                    tol.residual_tol,
                ),
                CheckResult::residual(
                    "kernels.sum",
                    refs::KERNEL_SUM,
                    gap(&direct.p_ker_sum, &block.p_ker_sum),
                    bound,
                ),
                CheckResult::residual(
                    "kernels.diff",
                    refs::KERNEL_DIFF,
                    gap(&direct.p_ker_diff, &block.p_ker_diff),
                    bound,
                ),
            ])
        })(),
    );

    push_result(
        &mut out,
        "negative_part",
        refs::NEGATIVE_PART,
        (|| {
            let bf = block_form(p, tol)?;
            let generic = negative_part_projection_unchecked(&bf.p1, tol)?;
            let s = crate::decomp::shifted_block(&bf.p1);
            let oracle = spectral_parts(&s, tol)?.p_minus;
            let halved = negative_part_projection_unchecked(&(&bf.p1 * c(0.5, 0.0)), tol)?;
            let minus = spectral_parts(&(p + p.adjoint()), tol)?.p_minus;
            Ok(vec![
                CheckResult::residual(
                    "negative_part.formula_vs_spectral",
                    refs::NEGATIVE_PART,
                    gap(&generic, &oracle),
                    tol.residual_tol * scale_of(&s),
                ),
                CheckResult::residual(
                    "negative_part.half_corner",
                    refs::NEGATIVE_PART_SUM,
                    gap(&bf.to_ambient(&halved), &minus),
                    bound,
                ),
            ])
        })(),
    );

    push_result(
        &mut out,
        "extremal",
        refs::POS_MAX,
        (|| {
            let bf = block_form(p, tol)?;
            let set = extremal_symmetries(p, tol)?;
            let kp = kernel_projections_direct(p, tol)?;
            let mut checks = Vec::new();
            for kind in ExtremalKind::ALL {
                let j = set.get(kind);
                let reference = match kind {
                    ExtremalKind::PosMin => refs::POS_MIN,
                    ExtremalKind::PosMax => refs::POS_MAX,
                    ExtremalKind::ContrMin => refs::CONTR_MIN,
                    ExtremalKind::ContrMax => refs::CONTR_MAX,
                };
                let name = kind.name();
                checks.push(CheckResult::residual(
                    format!("extremal.{name}.symmetry"),
                    reference,
                    symmetry_residual(j),
                    tol.residual_tol,
                ));
                checks.push(CheckResult::psd(
                    format!("extremal.{name}.admissible"),
                    reference,
                    &admission_check(kind.family(), p, j, tol),
                    tol,
                ));
                let block = extremal_symmetry_block(&bf, kind, tol)?;
                checks.push(CheckResult::residual(
                    format!("extremal.{name}.block_route"),
                    reference,
                    gap(j, &block),
                    bound,
                ));
            }
            let two_ker = &kp.p_ker_sum * c(2.0, 0.0);
            checks.push(CheckResult::residual(
                "extremal.identity_web",
                refs::WEB,
                frobenius(&(&set.pos_min + &set.contr_min))
                    .max(gap(&(&set.pos_max + &set.contr_min), &two_ker))
                    .max(gap(&(&set.pos_max - &set.pos_min), &two_ker)),
                bound,
            ));
            Ok(checks)
        })(),
    );

    push_result(
        &mut out,
        "sign_formula",
        refs::SIGN_FORMULA,
        (|| {
            let sf = sign_formula_symmetry(p, tol)?;
            Ok(vec![
                CheckResult::residual("sign_formula.pos_max", refs::SIGN_FORMULA, sf.pos_max_gap, bound),
                CheckResult::residual("sign_formula.kernel_sign", refs::SIGN_KERNEL, sf.kernel_residual, bound),
            ])
        })(),
    );

    for (offset, family) in [(0u64, SymmetryFamily::JPositive), (1, SymmetryFamily::JContractive)] {
        let probe = extremality_probe(p, family, samples.max(1), seed.wrapping_add(offset), tol);
        push_result(
            &mut out,
            &format!("probe.{}", family.name()),
            refs::POS_MAX,
            probe.map(|r| r.checks),
        );
    }

    push_result(
        &mut out,
        "range_identities",
        crate::decomp::refs::RANGE_PLUS_COMPLEMENT,
        range_projection_identities(p, tol),
    );

    push_result(
        &mut out,
        "intertwining",
        refs::INTERTWINING,
        (|| {
            let tw = intertwining_unitaries(p, tol)?;
            let unitary_gap = |u: &CMatrix| gap(&(u.adjoint() * u), &identity(u.ncols()));
            let (sp, sq) = (singular_values(&tw.p1), singular_values(&tw.q1));
            let sv_gap = if sp.len() == sq.len() {
                sp.iter().zip(&sq).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            } else {
                f64::INFINITY
            };
            Ok(vec![
                CheckResult::residual("intertwining.residual", refs::INTERTWINING, tw.residual, bound),
                CheckResult::residual(
                    "intertwining.u1_unitary",
                    refs::INTERTWINING,
                    unitary_gap(&tw.u1),
                    tol.residual_tol,
                ),
                CheckResult::residual(
                    "intertwining.v1_unitary",
                    refs::INTERTWINING,
                    unitary_gap(&tw.v1),
                    tol.residual_tol,
                ),
                CheckResult::residual("intertwining.singular_values", refs::INTERTWINING, sv_gap, bound),
            ])
        })(),
    );

    push_result(
        &mut out,
        "adjoint_similarity",
        refs::ADJOINT_SIMILARITY,
        (|| {
            let a = adjoint_similarity(p, tol)?;
            let n = p.nrows();
            Ok(vec![
                CheckResult::residual(
                    "adjoint_similarity.residual",
                    refs::ADJOINT_SIMILARITY,
                    a.residual,
                    bound,
                ),
                CheckResult::residual(
                    "adjoint_similarity.unitary",
                    refs::ADJOINT_SIMILARITY,
                    gap(&(a.u.adjoint() * &a.u), &identity(n)),
                    tol.residual_tol,
                ),
            ])
        })(),
    );

    push_result(
        &mut out,
        "equivalence",
        refs::EQUIVALENCE,
        (|| {
            let eq = complement_equivalence(p, tol)?;
            Ok(vec![
                CheckResult::residual("equivalence.residual", refs::EQUIVALENCE, eq.residual, bound),
                CheckResult::residual("equivalence.spectra", refs::EQUIVALENCE, eq.spectrum_gap, bound),
            ])
        })(),
    );

    out
}

/// Non-orthogonal `P`: the two witnesses are J-projection symmetries whose
/// difference is indefinite. Orthogonal `P`: `I` is the greatest J-projection
/// symmetry, checked against samples.
fn witness_checks(p: &CMatrix, samples: usize, seed: u64, tol: &ToleranceConfig) -> Result<Vec<CheckResult>> {
    let w = nonexistence_witnesses(p, tol)?;
    let bound = tol.residual_tol * scale_of(p);
    let family = SymmetryFamily::JProjection;
    let mut checks = vec![
        CheckResult::residual(
            "witnesses.j_a",
            refs::WITNESSES,
            j_projection_residual(p, &w.j_a),
            bound,
        ),
        CheckResult::residual(
            "witnesses.j_b",
            refs::WITNESSES,
            j_projection_residual(p, &w.j_b),
            bound,
        ),
    ];
    let bf = block_form(p, tol)?;
    let n = p.nrows();
    let draws = sample_symmetries(&bf, family, samples.max(1), seed.wrapping_add(2), tol)?;
    if w.report.orthogonal {
        let margins = par::try_map_indexed(draws.len(), |i| Ok(loewner_geq(&identity(n), &draws[i], tol)?.1))?;
        let worst = margins.into_iter().fold(f64::INFINITY, f64::min);
        checks.push(CheckResult::residual(
            "witnesses.dichotomy",
            refs::WITNESSES,
            j_projection_residual(p, &identity(n)),
            bound,
        ));
        checks.push(CheckResult::margin(
            "witnesses.identity_dominates",
            refs::WITNESSES,
            worst,
            tol.psd_tol,
        ));
    } else {
        checks.push(CheckResult::flag(
            "witnesses.dichotomy",
            refs::WITNESSES,
            w.report.verdict == Dominance::Indefinite,
        ));
        // a sample dominates both witnesses when both margins clear -psd_tol
        let dominated = par::try_map_indexed(draws.len(), |i| {
            Ok(loewner_geq(&draws[i], &w.j_a, tol)?.0 && loewner_geq(&draws[i], &w.j_b, tol)?.0)
        })?;
        checks.push(CheckResult::flag(
            "witnesses.no_common_upper_bound",
            refs::WITNESSES,
            !dominated.into_iter().any(|d| d),
        ));
    }
    Ok(checks)
}

fn split_checks(
    prefix: &str,
    reference: &str,
    p: &CMatrix,
    j: &CMatrix,
    split: &SplitResult,
    tol: &ToleranceConfig,
) -> Vec<CheckResult> {
    let bound = tol.residual_tol * scale_of(p).max(scale_of(&split.e1)).max(scale_of(&split.e2));
    let mut checks: Vec<CheckResult> = split
        .identity_residuals(p)
        .into_iter()
        .map(|(name, r)| CheckResult::residual(format!("{prefix}.{name}"), reference, r, bound))
        .collect();
    checks.extend(
        split
            .sign_checks(j, tol)
            .into_iter()
            .map(|(name, chk)| CheckResult::psd(format!("{prefix}.{name}"), reference, &chk, tol)),
    );
    checks
}

/// Computes a split and a report of its identities and sign checks.
pub fn split_report(p: &CMatrix, j: &CMatrix, kind: SplitKind, tol: &ToleranceConfig) -> Result<(SplitResult, Report)> {
    let (split, prefix, reference) = match kind {
        SplitKind::ContractiveExpansive => (
            contractive_expansive_split(p, j, tol)?,
            "split_contractive_expansive",
            refs::SPLIT_CE,
        ),
        SplitKind::PositiveNegative => (
            positive_negative_split(p, j, tol)?,
            "split_positive_negative",
            refs::SPLIT_PN,
        ),
    };
    let mut report = Report::new(Subject::of(p, Some(j), tol), *tol, None);
    report.checks = split_checks(prefix, reference, p, j, &split, tol);
    Ok((split, report))
}

const J_CHECKS: [(&str, &str); 6] = [
    ("j_projection", refs::WITNESSES),
    ("classify", refs::CLASSIFY),
    ("split_contractive_expansive", refs::SPLIT_CE),
    ("split_positive_negative", refs::SPLIT_PN),
    ("split_consistency", refs::SPLIT_CONSISTENT),
    ("witnesses", refs::WITNESSES),
];

fn j_checks(p: &CMatrix, j: &CMatrix, samples: usize, seed: u64, tol: &ToleranceConfig) -> Vec<CheckResult> {
    let bound = tol.residual_tol * scale_of(p);
    let mut out = vec![CheckResult::residual(
        "j_projection",
        refs::WITNESSES,
        j_projection_residual(p, j),
        bound,
    )];

    push_result(
        &mut out,
        "classify",
        refs::CLASSIFY,
        (|| {
            let cl = classify(p, j, tol)?;
            Ok(vec![
                CheckResult::flag("classify.j_projection", refs::CLASSIFY, cl.j_projection),
                complement_positivity_check(p, j, tol)?,
            ])
        })(),
    );

    push_result(
        &mut out,
        "split_contractive_expansive",
        refs::SPLIT_CE,
        (|| {
            let split = contractive_expansive_split(p, j, tol)?;
            Ok(split_checks(
                "split_contractive_expansive",
                refs::SPLIT_CE,
                p,
                j,
                &split,
                tol,
            ))
        })(),
    );

    push_result(
        &mut out,
        "split_positive_negative",
        refs::SPLIT_PN,
        (|| {
            let split = positive_negative_split(p, j, tol)?;
            Ok(split_checks(
                "split_positive_negative",
                refs::SPLIT_PN,
                p,
                j,
                &split,
                tol,
            ))
        })(),
    );

    push_result(
        &mut out,
        "split_consistency",
        refs::SPLIT_CONSISTENT,
        (|| {
            let n = p.nrows();
            let ce = contractive_expansive_split(p, j, tol)?;
            let pn = positive_negative_split(&(identity(n) - p), j, tol)?;
            Ok(vec![CheckResult::residual(
                "split_consistency.e1_eq_i_minus_q",
                refs::SPLIT_CONSISTENT,
                gap(&ce.e1, &(identity(n) - &pn.e1)).max(gap(&ce.e2, &(identity(n) - &pn.e2))),
                tol.residual_tol * scale_of(&ce.e1).max(scale_of(&ce.e2)),
            )])
        })(),
    );

    push_result(
        &mut out,
        "witnesses",
        refs::WITNESSES,
        witness_checks(p, samples, seed, tol),
    );
    out
}

/// Every check applicable to `p` (and `j`, when supplied), in a fixed order.
///
/// Never fails: errors become failed checks carrying the error text, and
/// checks whose preconditions do not hold are recorded as skipped.
pub fn full_report(p: &CMatrix, j: Option<&CMatrix>, tol: &ToleranceConfig, samples: usize, seed: u64) -> Report {
    let mut report = Report::new(Subject::of(p, j, tol), *tol, Some(seed));
    let idem = idempotency_residual(p, tol);
    let idempotent = match &idem {
        Ok((residual, bound)) => {
            report
                .checks
                .push(CheckResult::residual("idempotent", refs::IDEMPOTENT, *residual, *bound));
            residual <= bound
        }
        Err(e) => {
            report
                .checks
                .push(CheckResult::errored("idempotent", refs::IDEMPOTENT, e));
            false
        }
    };
    if !idempotent {
        for (name, reference) in [("structure", refs::BLOCK_FORM)].into_iter().chain(J_CHECKS) {
            report
                .checks
                .push(CheckResult::skipped(name, reference, "not idempotent"));
        }
        return report;
    }
    report.checks.extend(structural_checks(p, samples, seed, tol));

    let skip_reason = match j {
        None => Some("no J supplied"),
        Some(j) if j.shape() != p.shape() => Some("J has the wrong shape"),
        Some(j) if !is_symmetry(j, tol).unwrap_or(false) => Some("J is not a symmetry"),
        Some(j) if j_projection_residual(p, j) > tol.residual_tol * scale_of(p) => Some("JPJ≠P*"),
        Some(_) => None,
    };
    match (skip_reason, j) {
        (None, Some(j)) => report.checks.extend(j_checks(p, j, samples, seed, tol)),
        (reason, _) => {
            let reason = reason.unwrap_or("no J supplied");
            for (name, reference) in J_CHECKS {
                report.checks.push(CheckResult::skipped(name, reference, reason));
            }
        }
    }
    report
}
