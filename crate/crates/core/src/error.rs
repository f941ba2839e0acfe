use std::path::PathBuf;

use thiserror::Error;

/// First-stage diagnostics attached to a weak-instrument failure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstStage {
    /// Coefficient on the excluded instrument when regressing M on (1, T, z).
    pub coef: f64,
    /// Share of the residual variation in M (after partialling out 1 and T)
    /// explained by the instrument.
    pub partial_r2: f64,
    /// Reciprocal condition number of the column-equilibrated Z'X.
    pub rcond: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular design: column `{column}` is constant or collinear with the other regressors")]
    SingularDesign { column: &'static str },

    #[error(
        "weak instrument: Z'X is numerically singular (rcond {:.3e}); first stage coef {:.4}, partial R^2 {:.3e}",
        .0.rcond, .0.coef, .0.partial_r2
    )]
    WeakInstrument(FirstStage),

    #[error("eigensolver did not converge after {iterations} iterations (max residual {residual:.3e})")]
    NumericFailure { iterations: usize, residual: f64 },

    #[error("undefined contrast: treatment arm {arm} is empty")]
    UndefinedContrast { arm: u8 },

    #[error("{}:{line}: unknown unit id `{id}`", .path.display())]
    ReferentialIntegrity { path: PathBuf, line: usize, id: String },

    #[error("{}:{line}: {message}", .path.display())]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{failed} of {total} replications failed for estimator {estimator}")]
    AggregateFailure { estimator: String, failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
