use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants map onto the exit-code classes of the command-line front end:
/// everything except [`Error::Infeasible`] is a usage or configuration
/// problem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Mismatched dimensions or fields, zero vectors where a norm is divided by,
    /// non-finite components.
    #[error("usage error: {0}")]
    Usage(String),

    /// A parameter lies outside its admissible range (for example a radius
    /// outside (0,1) or a bracket with m > M).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An input violates a stated precondition (non-unit anchor vector,
    /// unnormalized weight function, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A family claimed to be orthonormal is not.
    #[error("orthonormality check failed at pair ({row}, {col}): deviation {deviation:e}")]
    NotOrthonormal {
        row: usize,
        col: usize,
        deviation: f64,
    },

    /// The hypothesis region for the requested parameters is empty, or no
    /// admissible instance could be found within the sampling budget.
    #[error("infeasible hypothesis: {0}")]
    Infeasible(String),

    /// The bound constant does not exist (for instance m - sum(rho_k^2) <= 0).
    #[error("constant undefined: {0}")]
    VacuousBound(String),

    /// A certificate was requested for an instance whose hypothesis fails.
    #[error("hypothesis not satisfied: {0}")]
    HypothesisFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
