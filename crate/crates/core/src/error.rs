use thiserror::Error;

/// Why an image sequence is not an element of the Catalan monoid.
///
/// Indices and values are 1-based, matching the domain `{1, ..., n+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("empty image sequence")]
    Empty,
    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("f({index}) = {value} is outside [1, {degree}]")]
    OutOfRange { index: usize, value: i64, degree: usize },
    #[error("not order-preserving at {index}: f({prev}) = {prev_value} > f({index}) = {value}", prev = .index - 1)]
    NotOrderPreserving { index: usize, prev_value: u32, value: u32 },
    #[error("not weakly increasing at {index}: f({index}) = {value} < {index}")]
    NotIncreasing { index: usize, value: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid map: {0}")]
    InvalidMap(#[from] MapError),
    /// Operands that do not live in the same ring, monoid, or poset.
    #[error("usage error: {0}")]
    Usage(String),
    /// A documented precondition of the operation does not hold.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("resource bound exceeded: {what} = {requested} exceeds the bound {bound}")]
    Resource {
        what: &'static str,
        requested: usize,
        bound: usize,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
