use std::path::{Path, PathBuf};
use std::process::Command;

use krein_cli::io::{read_matrix, write_matrix, ReportFile};
use krein_core::numcore::{frobenius, from_real, identity, zeros};
use krein_core::verify::{classify, Status};
use krein_core::{CMatrix, ToleranceConfig};

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn krein(args: &[&str], dir: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_krein"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

fn put(dir: &Path, name: &str, m: &CMatrix) -> PathBuf {
    let path = dir.join(name);
    write_matrix(&path, m).unwrap();
    path
}

fn oblique() -> CMatrix {
    from_real(2, 2, &[1.0, 1.0, 0.0, 0.0])
}

fn report(path: &Path) -> ReportFile {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exit_0_gen_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        krein(
            &[
                "gen",
                "idempotent",
                "--dim",
                "4",
                "--rank",
                "2",
                "--seed",
                "7",
                "-o",
                "P.json"
            ],
            dir.path()
        ),
        0
    );
    let p = read_matrix(&dir.path().join("P.json")).unwrap();
    assert!(frobenius(&(&p * &p - &p)) <= 1e-12);

    assert_eq!(
        krein(
            &[
                "gen",
                "idempotent",
                "--dim",
                "3",
                "--rank",
                "3",
                "--seed",
                "0",
                "-o",
                "I.json"
            ],
            dir.path()
        ),
        0
    );
    assert_eq!(read_matrix(&dir.path().join("I.json")).unwrap(), identity(3));
}

#[test]
fn gen_symmetry_for_contractive_family() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        krein(
            &[
                "gen",
                "idempotent",
                "--dim",
                "5",
                "--rank",
                "2",
                "--corner-scale",
                "2",
                "--seed",
                "3",
                "-o",
                "P.json"
            ],
            dir.path()
        ),
        0
    );
    assert_eq!(
        krein(
            &[
                "gen",
                "symmetry-for",
                "--for",
                "P.json",
                "--family",
                "contractive",
                "--seed",
                "1",
                "-o",
                "J.json"
            ],
            dir.path()
        ),
        0
    );
    let p = read_matrix(&dir.path().join("P.json")).unwrap();
    let j = read_matrix(&dir.path().join("J.json")).unwrap();
    assert!(classify(&p, &j, &ToleranceConfig::default()).unwrap().j_contractive);
}

#[test]
fn extremal_outputs() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "P.json", &oblique());
    put(dir.path(), "D.json", &from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    assert_eq!(
        krein(
            &["extremal", "D.json", "--which", "pos-max", "-o", "out.json"],
            dir.path()
        ),
        0
    );
    assert!(frobenius(&(read_matrix(&dir.path().join("out.json")).unwrap() - identity(2))) <= 1e-12);

    assert_eq!(
        krein(
            &["extremal", "P.json", "--which", "contr-min", "-o", "cm.json"],
            dir.path()
        ),
        0
    );
    let expected = from_real(2, 2, &[-S, -S, -S, S]);
    assert!(frobenius(&(read_matrix(&dir.path().join("cm.json")).unwrap() - expected)) <= 1e-12);

    assert_eq!(
        krein(
            &[
                "gen",
                "idempotent",
                "--dim",
                "6",
                "--rank",
                "2",
                "--seed",
                "2",
                "-o",
                "R.json"
            ],
            dir.path()
        ),
        0
    );
    assert_eq!(
        krein(
            &["extremal", "R.json", "--which", "sign-formula", "-o", "sf.json"],
            dir.path()
        ),
        0
    );
    assert_eq!(
        krein(
            &["extremal", "R.json", "--which", "pos-max", "-o", "pm.json"],
            dir.path()
        ),
        0
    );
    let sf = read_matrix(&dir.path().join("sf.json")).unwrap();
    let pm = read_matrix(&dir.path().join("pm.json")).unwrap();
    assert!(frobenius(&(sf - pm)) <= 1e-12);
}

#[test]
fn decompose_outputs() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "P.json", &oblique());
    put(dir.path(), "J.json", &from_real(2, 2, &[S, S, S, -S]));
    assert_eq!(
        krein(
            &["decompose", "P.json", "J.json", "--kind", "contr-exp", "-o", "ce"],
            dir.path()
        ),
        0
    );
    let e1 = read_matrix(&dir.path().join("ce_E1.json")).unwrap();
    let e2 = read_matrix(&dir.path().join("ce_E2.json")).unwrap();
    assert!(frobenius(&(e1 - identity(2))) <= 1e-12);
    assert!(frobenius(&(e2 - oblique())) <= 1e-12);
    assert!(report(&dir.path().join("ce_report.json")).report.overall_pass());

    assert_eq!(
        krein(
            &["decompose", "P.json", "J.json", "--kind", "pos-neg", "-o", "pn"],
            dir.path()
        ),
        0
    );
    let q = read_matrix(&dir.path().join("pn_Q.json")).unwrap();
    let r = read_matrix(&dir.path().join("pn_R.json")).unwrap();
    assert!(frobenius(&(q - oblique())) <= 1e-12);
    assert!(frobenius(&(r - zeros(2, 2))) <= 1e-12);

    put(dir.path(), "D.json", &from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    put(dir.path(), "I.json", &identity(2));
    assert_eq!(
        krein(
            &["decompose", "D.json", "I.json", "--kind", "pos-neg", "-o", "d"],
            dir.path()
        ),
        0
    );
    let q = read_matrix(&dir.path().join("d_Q.json")).unwrap();
    assert!(frobenius(&(q - from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]))) <= 1e-12);
}

#[test]
fn exit_0_verify_and_skip_reason() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        krein(
            &[
                "gen",
                "idempotent",
                "--dim",
                "5",
                "--rank",
                "2",
                "--seed",
                "1",
                "-o",
                "P.json"
            ],
            dir.path()
        ),
        0
    );
    assert_eq!(
        krein(
            &["verify", "P.json", "--samples", "100", "--seed", "1", "-o", "r.json"],
            dir.path()
        ),
        0
    );
    let rep = report(&dir.path().join("r.json"));
    assert_eq!(rep.schema_version, "1");
    assert!(rep.report.checks.iter().all(|c| !c.paper_ref.is_empty()));

    put(dir.path(), "O.json", &oblique());
    put(dir.path(), "I.json", &identity(2));
    assert_eq!(krein(&["verify", "O.json", "I.json", "-o", "s.json"], dir.path()), 0);
    let rep = report(&dir.path().join("s.json"));
    let skipped: Vec<_> = rep
        .report
        .checks
        .iter()
        .filter(|c| c.status == Status::Skipped)
        .collect();
    assert!(!skipped.is_empty());
    assert!(skipped.iter().all(|c| c.reason.as_deref() == Some("JPJ≠P*")));
}

#[test]
fn exit_1_not_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "bad.json", &from_real(2, 2, &[1.0, 0.0, 0.0, 0.5]));
    assert_eq!(krein(&["verify", "bad.json", "-o", "r.json"], dir.path()), 1);
    let rep = report(&dir.path().join("r.json"));
    assert_eq!(rep.report.get("idempotent").unwrap().status, Status::Fail);
    assert_eq!(
        krein(
            &["extremal", "bad.json", "--which", "pos-min", "-o", "x.json"],
            dir.path()
        ),
        1
    );
}

#[test]
fn exit_2_usage() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(krein(&["frobnicate"], dir.path()), 2);
    assert_eq!(
        krein(&["gen", "idempotent", "--rank", "2", "-o", "P.json"], dir.path()),
        2
    );
    assert_eq!(
        krein(
            &["gen", "idempotent", "--dim", "2", "--rank", "3", "-o", "P.json"],
            dir.path()
        ),
        2
    );
    assert_eq!(
        krein(&["extremal", "P.json", "--which", "middle", "-o", "x.json"], dir.path()),
        2
    );
    assert_eq!(
        krein(&["--tol-psd", "-1", "verify", "P.json", "-o", "x.json"], dir.path()),
        2
    );
}

#[test]
fn exit_3_io() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(krein(&["verify", "missing.json", "-o", "r.json"], dir.path()), 3);
    std::fs::write(dir.path().join("garbage.json"), "{\"rows\": 2}").unwrap();
    assert_eq!(
        krein(
            &["extremal", "garbage.json", "--which", "pos-min", "-o", "x.json"],
            dir.path()
        ),
        3
    );
    put(dir.path(), "P.json", &identity(2));
    assert_eq!(
        krein(
            &["extremal", "P.json", "--which", "pos-min", "-o", "no/such/dir/x.json"],
            dir.path()
        ),
        3
    );
}

#[test]
fn exit_4_singular_shift() {
    // P = [0.5] passes idempotency only under a loose residual tolerance; P + P* - I = 0
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "H.json", &from_real(1, 1, &[0.5]));
    assert_eq!(
        krein(
            &[
                "--tol-res",
                "1",
                "extremal",
                "H.json",
                "--which",
                "sign-formula",
                "-o",
                "x.json"
            ],
            dir.path()
        ),
        4
    );
}

#[test]
fn exit_5_not_a_j_projection() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "P.json", &oblique());
    put(dir.path(), "I.json", &identity(2));
    assert_eq!(
        krein(
            &["decompose", "P.json", "I.json", "--kind", "contr-exp", "-o", "d"],
            dir.path()
        ),
        5
    );
}

#[test]
fn reports_are_byte_identical_for_fixed_seeds() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        krein(
            &[
                "gen",
                "idempotent",
                "--dim",
                "6",
                "--rank",
                "3",
                "--corner-scale",
                "2",
                "--seed",
                "5",
                "-o",
                "P.json"
            ],
            dir.path()
        ),
        0
    );
    assert_eq!(
        krein(
            &[
                "gen",
                "idempotent",
                "--dim",
                "6",
                "--rank",
                "3",
                "--corner-scale",
                "2",
                "--seed",
                "5",
                "-o",
                "P2.json"
            ],
            dir.path()
        ),
        0
    );
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("P.json"), read("P2.json"));
    assert_eq!(
        krein(
            &["gen", "symmetry-for", "--for", "P.json", "--seed", "2", "-o", "J.json"],
            dir.path()
        ),
        0
    );
    for out in ["a.json", "b.json"] {
        assert_eq!(
            krein(
                &[
                    "verify",
                    "P.json",
                    "J.json",
                    "--samples",
                    "40",
                    "--seed",
                    "9",
                    "-o",
                    out
                ],
                dir.path()
            ),
            0
        );
    }
    assert_eq!(read("a.json"), read("b.json"));
}

#[test]
fn batch_runs_every_case() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("in")).unwrap();
    put(dir.path(), "in/a.json", &oblique());
    put(dir.path(), "in/b.json", &from_real(2, 2, &[1.0, 0.0, 0.0, 0.5]));
    std::fs::write(dir.path().join("in/c.json"), "not json").unwrap();
    put(dir.path(), "in/d.json", &identity(3));
    assert_eq!(
        krein(&["verify", "--glob", "in/*.json", "-o", "batch.json"], dir.path()),
        1
    );
    let batch: krein_cli::io::BatchReportFile =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("batch.json")).unwrap()).unwrap();
    let verdicts: Vec<bool> = batch.cases.iter().map(|c| c.report.overall_pass()).collect();
    assert_eq!(verdicts, [true, false, false, true]);

    assert_eq!(
        krein(&["verify", "--glob", "none/*.json", "-o", "x.json"], dir.path()),
        3
    );
}
