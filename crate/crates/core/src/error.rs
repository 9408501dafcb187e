use thiserror::Error;

/// Errors raised by the numeric routines.
///
/// Identity checks never return these for a failed identity; failures are
/// recorded in the report instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("harmonic order must be at least 1")]
    ZeroOrder,

    #[error("x = {0} lies outside the domain x > -1")]
    OutOfDomain(String),

    #[error("series with exponent s = {0} diverges; s must be at least 2")]
    Divergent(u32),

    #[error("invalid rational literal {0:?}; expected p/q")]
    ParseRational(String),

    #[error("term {n} of {target} disagrees with its reference value")]
    TermMismatch { target: String, n: u64 },

    #[error("quadrature did not converge: {evaluations} evaluations, error estimate {error:e}")]
    NoConvergence { evaluations: u64, error: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
