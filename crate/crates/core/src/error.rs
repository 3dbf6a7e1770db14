use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("singular evaluation: {0}")]
    Singularity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("accuracy target missed: achieved {achieved:.3e}, target {target:.3e} ({context})")]
    Accuracy {
        achieved: f64,
        target: f64,
        context: String,
    },
    #[error("degenerate sampling: {0}")]
    Degenerate(String),
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    pub fn param(msg: impl Into<String>) -> Self {
        LabError::Parameter(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Accuracy failures are reported as "inconclusive" rather than "fail".
    pub fn is_accuracy(&self) -> bool {
        matches!(self, LabError::Accuracy { .. })
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
