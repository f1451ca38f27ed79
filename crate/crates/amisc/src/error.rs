//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by surrogate construction, model evaluation, and studies.
#[derive(Debug, Error)]
pub enum Error {
    /// A univariate rule was constructed from invalid data (e.g. duplicate nodes).
    #[error("invalid rule: {0}")]
    InvalidRule(String),

    /// An index set violates the downward-closed requirement.
    #[error("index set not downward closed: {index} present but {missing} absent")]
    NotDownwardClosed { index: String, missing: String },

    /// A tensor component was used before its model values were populated.
    #[error("component not ready: {0}")]
    NotReady(String),

    /// Invalid argument or configuration value.
    #[error("validation: {0}")]
    Validation(String),

    /// A model evaluation failed; carries the offending discretization and input.
    #[error("model evaluation failed at alpha=({alpha}), z={z:?}: {message}")]
    ModelEvaluation {
        alpha: String,
        z: Vec<f64>,
        message: String,
    },

    /// Sobol indices were requested for a quantity with zero variance.
    #[error("total variance is zero for QoI {0}; Sobol indices are undefined")]
    ZeroVariance(usize),

    /// A sample set has no spread (all values equal).
    #[error("degenerate sample set: {0}")]
    DegenerateSamples(String),

    /// The reference values for a relative error metric have zero range.
    #[error("zero range in reference values: {0}")]
    ZeroRange(String),

    /// Bad study configuration.
    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
