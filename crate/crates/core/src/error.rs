use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain the criteria are stated for.
    #[error("{name} must be in {domain} (got {value})")]
    InvalidParameter {
        name: &'static str,
        domain: &'static str,
        value: f64,
    },
    #[error("tail bound did not drop below eps={eps:e} before n_max={n_max}")]
    TruncationNotReached { eps: f64, n_max: usize },
    #[error("predicate {0} needs R^tau(A,B) parameters (--A, --B, --tau-re, --tau-im)")]
    MissingRParams(&'static str),
    #[error("|z| = {0} is outside the open unit disk")]
    DomainError(f64),
    #[error("tolerance must be a positive finite number (got {0})")]
    InvalidTolerance(f64),
    #[error("expected a {expected} coefficient sequence")]
    WrongConvention { expected: &'static str },
    #[error("malformed coefficient sequence: {0}")]
    MalformedSeries(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, domain: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            domain,
            value,
        }
    }
}
