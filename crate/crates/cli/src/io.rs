//! Matrix and report files.
//!
//! Matrices are JSON objects `{"rows", "cols", "data"}` with `data` a list of
//! rows of `[re, im]` pairs. Numbers are written with 17 significant digits so
//! a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use krein_core::verify::Report;
use krein_core::CMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Fs { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed file: {message}")]
    Format { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let data = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|k| [m[(i, k)].re, m[(i, k)].im]).collect())
            .collect();
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.data.len() != self.rows {
            return Err(format!("expected {} rows, found {}", self.rows, self.data.len()));
        }
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(format!("row {i}: expected {} entries, found {}", self.cols, row.len()));
            }
            if row.iter().flatten().any(|x| !x.is_finite()) {
                return Err(format!("row {i}: non-finite entry"));
            }
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Result<CMatrix, String> {
        self.validate()?;
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, k| {
            let [re, im] = self.data[i][k];
            Complex64::new(re, im)
        }))
    }

    /// Canonical text: fixed key order, one matrix row per line, `{:.16e}` numbers.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{{\n  \"rows\": {},\n  \"cols\": {},\n  \"data\": [",
            self.rows, self.cols
        );
        for (i, row) in self.data.iter().enumerate() {
            out.push_str(if i == 0 { "\n    [" } else { ",\n    [" });
            for (k, [re, im]) in row.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "[{}, {}]", number(*re), number(*im));
            }
            out.push(']');
        }
        out.push_str(if self.data.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        out
    }
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// A report document: the schema version followed by the report fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: String,
    #[serde(flatten)]
    pub report: Report,
}

impl ReportFile {
    pub fn new(report: Report) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            report,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchCase {
    pub path: String,
    #[serde(flatten)]
    pub report: Report,
}

/// Reports from a `--glob` run, one case per input file in path order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReportFile {
    pub schema_version: String,
    pub cases: Vec<BatchCase>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), IoError> {
    let fs_err = |source| IoError::Fs {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fs_err)?;
    tmp.write_all(contents.as_bytes()).map_err(fs_err)?;
    tmp.as_file().sync_all().map_err(fs_err)?;
    tmp.persist(path).map_err(|e| fs_err(e.error))?;
    Ok(())
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<(), IoError> {
    write_atomic(path, &MatrixFile::from_matrix(m).to_text())
}

pub fn read_matrix(path: &Path) -> Result<CMatrix, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Fs {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text).map_err(|message| IoError::Format {
        path: path.to_path_buf(),
        message,
    })
}

pub fn parse_matrix(text: &str) -> Result<CMatrix, String> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    file.to_matrix()
}
