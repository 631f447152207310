use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use krein_core::decomp::SplitKind;
use krein_core::projform::{block_form, IdempotentGenerator};
use krein_core::symfactory::{
    extremal_symmetry, sample_symmetries, sign_formula_symmetry, ExtremalKind, SymmetryFamily,
};
use krein_core::verify::{full_report, split_report, CheckResult, Report, Subject};
use krein_core::{par, CMatrix, KreinError, ToleranceConfig};

use crate::io::{
    read_matrix, to_json, write_atomic, write_matrix, BatchCase, BatchReportFile, IoError, ReportFile, SCHEMA_VERSION,
};

pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const SINGULAR_SHIFT: i32 = 4;
    pub const NOT_J_PROJECTION: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(
    name = "krein",
    version,
    about = "Extremal symmetries and decompositions of idempotent matrices"
)]
pub struct Cli {
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Relative cutoff for numerical rank and kernels.
    #[arg(long = "tol-rank", global = true, default_value_t = 1e-10)]
    pub tol_rank: f64,
    /// Relative slack for semidefiniteness.
    #[arg(long = "tol-psd", global = true, default_value_t = 1e-9)]
    pub tol_psd: f64,
    /// Relative bound for identity residuals.
    #[arg(long = "tol-res", global = true, default_value_t = 1e-9)]
    pub tol_res: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenKind {
    Idempotent,
    SymmetryFor,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Projection,
    Positive,
    Contractive,
}

impl From<FamilyArg> for SymmetryFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Projection => SymmetryFamily::JProjection,
            FamilyArg::Positive => SymmetryFamily::JPositive,
            FamilyArg::Contractive => SymmetryFamily::JContractive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    PosMin,
    PosMax,
    ContrMin,
    ContrMax,
    SignFormula,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    ContrExp,
    PosNeg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random idempotent, or a random admissible symmetry for a given one.
    Gen {
        kind: GenKind,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long = "corner-scale", default_value_t = 1.0)]
        corner_scale: f64,
        #[arg(long, value_enum, default_value = "projection")]
        family: FamilyArg,
        /// Idempotent the symmetry is drawn for.
        #[arg(long = "for")]
        for_path: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Write one of the extremal symmetries of an idempotent.
    Extremal {
        p: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Split a J-projection; writes `<out>_E1.json`, `<out>_E2.json` (or `_Q`, `_R`) and `<out>_report.json`.
    Decompose {
        p: PathBuf,
        j: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run every applicable check and write a report.
    Verify {
        p: Option<PathBuf>,
        j: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Verify every idempotent matching the pattern (no J).
        #[arg(long)]
        glob: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(IoError),
    Core(KreinError),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Self::Io(e)
    }
}

impl From<KreinError> for Failure {
    fn from(e: KreinError) -> Self {
        Self::Core(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Self::Usage(_) => exit::USAGE,
            Self::Io(_) => exit::IO,
            Self::Core(e) => core_code(e),
        }
    }
}

fn core_code(e: &KreinError) -> i32 {
    match e {
        KreinError::SingularShift { .. } => exit::SINGULAR_SHIFT,
        KreinError::NotJProjection { .. } => exit::NOT_J_PROJECTION,
        KreinError::BadTolerance { .. } | KreinError::BadParameter { .. } | KreinError::BadRank { .. } => exit::USAGE,
        _ => exit::CHECK_FAILED,
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage: {m}"),
            Self::Io(e) => write!(f, "{e}"),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => exit::PASS,
                _ => exit::USAGE,
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("krein: {f}");
            f.code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    let tol = ToleranceConfig::new(cli.tol.tol_rank, cli.tol.tol_psd, cli.tol.tol_res)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    match &cli.command {
        Command::Gen {
            kind,
            dim,
            rank,
            corner_scale,
            family,
            for_path,
            seed,
            out,
        } => gen(
            *kind,
            *dim,
            *rank,
            *corner_scale,
            *family,
            for_path.as_deref(),
            *seed,
            out,
            &tol,
        ),
        Command::Extremal { p, which, out } => extremal(p, *which, out, &tol),
        Command::Decompose { p, j, kind, out } => decompose(p, j, *kind, out, &tol),
        Command::Verify {
            p,
            j,
            samples,
            seed,
            glob,
            out,
        } => match (glob, p) {
            (Some(pattern), None) => verify_batch(pattern, *samples, *seed, out, &tol),
            (None, Some(p)) => verify_one(p, j.as_deref(), *samples, *seed, out, &tol),
            (Some(_), Some(_)) => Err(Failure::Usage("give either a matrix path or --glob, not both".into())),
            (None, None) => Err(Failure::Usage("a matrix path or --glob is required".into())),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn gen(
    kind: GenKind,
    dim: Option<usize>,
    rank: Option<usize>,
    corner_scale: f64,
    family: FamilyArg,
    for_path: Option<&Path>,
    seed: u64,
    out: &Path,
    tol: &ToleranceConfig,
) -> Result<i32, Failure> {
    let m = match kind {
        GenKind::Idempotent => {
            let (Some(dim), Some(rank)) = (dim, rank) else {
                return Err(Failure::Usage("gen idempotent needs --dim and --rank".into()));
            };
            IdempotentGenerator::new(dim, rank, corner_scale).sample(seed)?
        }
        GenKind::SymmetryFor => {
            let Some(path) = for_path else {
                return Err(Failure::Usage("gen symmetry-for needs --for <idempotent file>".into()));
            };
            let p = read_matrix(path)?;
            let bf = block_form(&p, tol)?;
            sample_symmetries(&bf, family.into(), 1, seed, tol)?.remove(0)
        }
    };
    write_matrix(out, &m)?;
    Ok(exit::PASS)
}

fn extremal(p: &Path, which: Which, out: &Path, tol: &ToleranceConfig) -> Result<i32, Failure> {
    let p = read_matrix(p)?;
    let j = match which {
        Which::PosMin => extremal_symmetry(&p, ExtremalKind::PosMin, tol)?,
        Which::PosMax => extremal_symmetry(&p, ExtremalKind::PosMax, tol)?,
        Which::ContrMin => extremal_symmetry(&p, ExtremalKind::ContrMin, tol)?,
        Which::ContrMax => extremal_symmetry(&p, ExtremalKind::ContrMax, tol)?,
        Which::SignFormula => sign_formula_symmetry(&p, tol)?.symmetry,
    };
    write_matrix(out, &j)?;
    Ok(exit::PASS)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

fn decompose(p: &Path, j: &Path, kind: KindArg, out: &Path, tol: &ToleranceConfig) -> Result<i32, Failure> {
    let p = read_matrix(p)?;
    let j = read_matrix(j)?;
    let (split_kind, names) = match kind {
        KindArg::ContrExp => (SplitKind::ContractiveExpansive, ["_E1.json", "_E2.json"]),
        KindArg::PosNeg => (SplitKind::PositiveNegative, ["_Q.json", "_R.json"]),
    };
    let (split, report) = split_report(&p, &j, split_kind, tol)?;
    write_matrix(&with_suffix(out, names[0]), &split.e1)?;
    write_matrix(&with_suffix(out, names[1]), &split.e2)?;
    let pass = report.overall_pass();
    write_atomic(&with_suffix(out, "_report.json"), &to_json(&ReportFile::new(report)))?;
    Ok(if pass { exit::PASS } else { exit::CHECK_FAILED })
}

fn verify_one(
    p: &Path,
    j: Option<&Path>,
    samples: usize,
    seed: u64,
    out: &Path,
    tol: &ToleranceConfig,
) -> Result<i32, Failure> {
    if samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    let p = read_matrix(p)?;
    let j = j.map(read_matrix).transpose()?;
    let report = full_report(&p, j.as_ref(), tol, samples, seed);
    let pass = report.overall_pass();
    write_atomic(out, &to_json(&ReportFile::new(report)))?;
    Ok(if pass { exit::PASS } else { exit::CHECK_FAILED })
}

fn verify_batch(pattern: &str, samples: usize, seed: u64, out: &Path, tol: &ToleranceConfig) -> Result<i32, Failure> {
    if samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    let paths = glob::glob(pattern).map_err(|e| Failure::Usage(format!("bad --glob pattern: {e}")))?;
    let mut paths: Vec<PathBuf> = paths.filter_map(|p| p.ok()).collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Io(IoError::Fs {
            path: PathBuf::from(pattern),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no files match"),
        }));
    }
    let cases = par::map_indexed(paths.len(), |i| {
        let path = &paths[i];
        let report = match read_matrix(path) {
            Ok(p) => full_report(&p, None, tol, samples, seed),
            Err(e) => unreadable_report(&e, tol, seed),
        };
        BatchCase {
            path: path.display().to_string(),
            report,
        }
    });
    let pass = cases.iter().all(|c| c.report.overall_pass());
    let file = BatchReportFile {
        schema_version: SCHEMA_VERSION.to_string(),
        cases,
    };
    write_atomic(out, &to_json(&file))?;
    Ok(if pass { exit::PASS } else { exit::CHECK_FAILED })
}

fn unreadable_report(e: &IoError, tol: &ToleranceConfig, seed: u64) -> Report {
    let empty = CMatrix::zeros(0, 0);
    let mut report = Report::new(Subject::of(&empty, None, tol), *tol, Some(seed));
    let mut check = CheckResult::flag("input", "readable matrix file", false);
    check.reason = Some(e.to_string());
    report.checks.push(check);
    report
}
