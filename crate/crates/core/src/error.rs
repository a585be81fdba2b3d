use thiserror::Error;

/// Errors produced by the phasematch library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// A closed form hits a removable singularity (for example `sin φ = 0`).
    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("infeasible target: {0}")]
    Infeasible(String),

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {value}")))
    }
}
