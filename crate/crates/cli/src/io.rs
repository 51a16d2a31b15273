//! Matrix files: `{"rows": r, "cols": c, "data": [[...], ...]}` where each
//! entry is a real number or a `[re, im]` pair.

use std::fs;
use std::path::Path;

use pencilk::{Matrix, C64};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::format::{Json, NumFmt};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Entry>>,
}

impl MatrixFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid matrix JSON: {e}")))
    }

    pub fn to_matrix(&self) -> CliResult<Matrix> {
        if self.data.len() != self.rows {
            return Err(CliError::Parse(format!(
                "matrix declares {} rows but data has {}",
                self.rows,
                self.data.len()
            )));
        }
        let mut values = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(CliError::Parse(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.cols
                )));
            }
            values.extend(row.iter().map(|e| e.value()));
        }
        Ok(Matrix::new(self.rows, self.cols, values)?)
    }
}

/// Reads and validates a matrix file.
pub fn read_matrix(path: &Path) -> CliResult<Matrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    MatrixFile::parse(&text)
        .and_then(|m| m.to_matrix())
        .map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
}

/// Reads a vector stored as an `n x 1` or `1 x n` matrix file.
pub fn read_vector(path: &Path) -> CliResult<Vec<C64>> {
    let m = read_matrix(path)?;
    match m.shape() {
        (_, 1) => Ok(m.col(0)),
        (1, _) => Ok(m.row(0).to_vec()),
        (r, c) => Err(CliError::Parse(format!(
            "{}: expected a vector (n x 1 or 1 x n), got {r}x{c}",
            path.display()
        ))),
    }
}

/// Matrix file text at the given precision.
pub fn matrix_text(m: &Matrix, f: &NumFmt) -> String {
    Json::matrix(m).render(f)
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
