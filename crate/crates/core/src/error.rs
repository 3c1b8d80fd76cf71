use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

/// Every failure the lab can report. Variants map one-to-one onto the FFI
/// status codes and onto the CLI exit codes (config vs numerical).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate in input")]
    NonFinite,

    #[error("region is infeasible (empty)")]
    Infeasible,

    #[error("region or objective is unbounded")]
    Unbounded,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inconsistent representation: {0}")]
    Inconsistent(String),

    #[error("iteration did not converge (residual {residual:e})")]
    Convergence { residual: f64 },

    #[error("point is not in the interior")]
    NotInterior,

    #[error("point is not in the cone")]
    NotInCone,

    #[error("point is not in the body")]
    NotInBody,

    #[error("point is not an extreme point of the body")]
    NotExtreme,

    #[error("point is not on the unit sphere (gauge {gauge})")]
    NotOnSphere { gauge: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid body recipe: {0}")]
    InvalidRecipe(String),

    #[error("oracle operand requires an explicit sampling budget")]
    NeedsSamplingBudget,

    #[error("sampling region is degenerate (acceptance below {acceptance:e})")]
    DegenerateRegion { acceptance: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path:?}: {message}")]
    Io { path: PathBuf, message: String },
}

impl LabError {
    /// Errors caused by the caller's configuration rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            LabError::Config(_) | LabError::InvalidRecipe(_) | LabError::InvalidParameter(_)
        )
    }
}

impl LabError {
    /// Stable numeric code, shared by report rows and the C interface.
    pub fn code(&self) -> i32 {
        match self {
            LabError::DimensionMismatch { .. } => 1,
            LabError::NonFinite => 2,
            LabError::Infeasible => 3,
            LabError::Unbounded => 4,
            LabError::Unsupported(_) => 5,
            LabError::Inconsistent(_) => 6,
            LabError::Convergence { .. } => 7,
            LabError::NotInterior => 8,
            LabError::NotInCone => 9,
            LabError::NotInBody => 10,
            LabError::NotExtreme => 11,
            LabError::NotOnSphere { .. } => 12,
            LabError::InvalidParameter(_) => 13,
            LabError::InvalidRecipe(_) => 14,
            LabError::NeedsSamplingBudget => 15,
            LabError::DegenerateRegion { .. } => 16,
            LabError::Config(_) => 17,
            LabError::Io { .. } => 18,
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(LabError::DimensionMismatch { expected, got })
    }
}
