use thiserror::Error;

/// Errors produced by model construction and analysis routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A configuration value violates a model invariant. `field` uses
    /// dotted-path notation (e.g. `technology.params.tau`).
    #[error("invalid config: {field}: {message}")]
    InvalidConfig { field: String, message: String },

    /// The requested operation is not defined for this combination of
    /// technology, action sets, or costs.
    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("player index {index} out of range for n={n}")]
    PlayerIndex { index: usize, n: usize },

    #[error("contribution level {ell} out of range for n={n}")]
    LevelOutOfRange { ell: usize, n: usize },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// An enumeration would exceed its configured profile cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

impl Error {
    pub fn invalid_config(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
