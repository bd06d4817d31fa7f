//! Crate-wide error type and result alias.

use std::path::PathBuf;

/// Errors produced by the simulator, analysis, fitting and I/O layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A single argument violated its domain (negative time, finesse <= 0, ...).
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Config-level validation; collects every offending field.
    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    /// An operation that requires data received none.
    #[error("empty input: {0}")]
    Empty(&'static str),

    /// Fewer residuals than free parameters.
    #[error("underdetermined fit: {residuals} residual(s) for {params} parameter(s)")]
    Underdetermined { residuals: usize, params: usize },

    /// The model produced NaN/inf during a fit.
    #[error("model returned non-finite output at parameters {params:?}")]
    NonFiniteModel { params: Vec<f64> },

    /// The optimizer ran out of iterations or damping range.
    #[error("fit did not converge after {iterations} iteration(s); residuals: {}",
        .breakdown.iter().map(|(n, r)| format!("{n}={r:.3e}")).collect::<Vec<_>>().join(", "))]
    NonConvergence {
        iterations: u32,
        breakdown: Vec<(String, f64)>,
    },

    /// A structured input file had a bad row.
    #[error("malformed input at line {line}: {message}")]
    Malformed { line: usize, message: String },

    /// Filesystem failure, annotated with the path involved.
    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// JSON (de)serialization failure.
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    /// CSV (de)serialization failure.
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
