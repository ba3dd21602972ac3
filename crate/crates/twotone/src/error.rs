//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by model construction, solvers, and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument is outside the mathematical domain of an
    /// operation (e.g. a detuning that makes a closed form singular).
    #[error("domain error: {0}")]
    Domain(String),

    /// Fisher information is 0/0 away from the analytic-limit branch; the
    /// caller asked for a value that is genuinely indeterminate.
    #[error("indeterminate Fisher information: {0}")]
    IndeterminateFisher(String),

    /// A bracketed root solve found no sign change in the search interval.
    #[error("no root in bracket: {0}")]
    NoRoot(String),

    /// The resolution-limit fixed point has no crossing in the search range.
    #[error("no resolution crossing: {0}")]
    NoResolution(String),

    /// An iterative fit exhausted its iteration budget without converging.
    #[error("fit failed to converge: {0}")]
    FitFailure(String),

    /// A scenario or experiment configuration failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem trouble while reading configs or writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a manifest or config document.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

}

pub type Result<T> = std::result::Result<T, Error>;
