use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({0}, {1}) lies outside the domain of the growth function")]
    OutsideDomain(f64, f64),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("could not bracket {what} below the cap {cap:e}")]
    Overflow { what: String, cap: f64 },

    #[error("points ({0}, {1}) and ({2}, {3}) lie in different components")]
    Unreachable(f64, f64, f64, f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    /// A gate condition failed; carries the offending report as JSON.
    #[error("precondition {condition} failed")]
    Precondition {
        condition: String,
        report: Box<serde_json::Value>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
