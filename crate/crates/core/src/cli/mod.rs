//! Plumbing behind the `lowit` binary. Commands render their artifacts into
//! strings first and write them afterwards, which keeps them testable and
//! byte-for-byte deterministic.

pub mod reproduce;
pub mod svg;
pub mod witness_cmd;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use reproduce::{render, write_artifacts, Artifacts, Figure};
pub use witness_cmd::{evaluate_records, read_records, MomentRecord, WitnessOutput};

/// Plot floor for `N = −∞` and anything below it.
pub const DEFAULT_CLAMP_DB: f64 = -60.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("validation failed")]
    ValidationFailed,
}

impl CliError {
    /// 1 for a failed validation run, 2 for anything wrong with the input
    /// or the output location.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed => 1,
            CliError::Input(_) | CliError::Write { .. } => 2,
        }
    }
}

/// Settings shared by the commands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
    pub cutoff_max: usize,
    pub clamp_floor: f64,
    pub points: Option<usize>,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: crate::witness::DEFAULT_TOL,
            seed: 42,
            trials: 200,
            cutoff_max: 128,
            clamp_floor: DEFAULT_CLAMP_DB,
            points: None,
            svg: false,
        }
    }
}

impl RunConfig {
    pub fn check(&self) -> Result<(), CliError> {
        if !self.tol.is_finite() || self.tol < 0.0 {
            return Err(CliError::Input(format!("tolerance must be a finite number ≥ 0, got {}", self.tol)));
        }
        if self.cutoff_max < 2 {
            return Err(CliError::Input(format!("cutoff must be at least 2, got {}", self.cutoff_max)));
        }
        if !self.clamp_floor.is_finite() {
            return Err(CliError::Input("clamp floor must be finite".into()));
        }
        if let Some(p) = self.points {
            if p < 2 {
                return Err(CliError::Input(format!("need at least 2 points, got {p}")));
            }
        }
        Ok(())
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
