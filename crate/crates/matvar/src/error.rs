use std::fmt;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the region where the quantity is defined.
    Domain { what: String, detail: String },
    /// A lower hypergeometric parameter produced a zero Pochhammer symbol.
    Pole { parameter: f64, partition: String },
    /// A series was rejected by the structural or numerical divergence guard.
    Divergence { detail: String },
    /// A request exceeded a configured resource ceiling.
    Resource { detail: String },
    /// Matrix shapes do not agree.
    Dimension { expected: String, found: String },
    /// A matrix that must be symmetric positive definite is not.
    NotSpd { min_eigenvalue: f64 },
    /// A matrix is numerically singular.
    Singular { detail: String },
    /// The requested combination has no closed form in this crate.
    Unsupported { detail: String },
    /// A hypergeometric factor that must be positive came out non-positive.
    NonPositive { what: String, value: f64 },
    /// Numerical integration did not reach its tolerance.
    Quadrature { detail: String },
    /// Malformed input (JSON, matrix text, table dump).
    Parse { detail: String },
    /// Filesystem failure.
    Io { detail: String },
}

impl Error {
    pub(crate) fn domain(what: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Domain { what: what.into(), detail: detail.into() }
    }

    pub(crate) fn dimension(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::Dimension { expected: expected.into(), found: found.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, detail } => write!(f, "domain error in {what}: {detail}"),
            Error::Pole { parameter, partition } => {
                write!(f, "pole: lower parameter {parameter} vanishes at partition {partition}")
            }
            Error::Divergence { detail } => write!(f, "divergent series: {detail}"),
            Error::Resource { detail } => write!(f, "resource limit: {detail}"),
            Error::Dimension { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSpd { min_eigenvalue } => {
                write!(f, "matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")
            }
            Error::Singular { detail } => write!(f, "singular matrix: {detail}"),
            Error::Unsupported { detail } => write!(f, "unsupported: {detail}"),
            Error::NonPositive { what, value } => {
                write!(f, "{what} must be positive, got {value:e}")
            }
            Error::Quadrature { detail } => write!(f, "quadrature failed: {detail}"),
            Error::Parse { detail } => write!(f, "parse error: {detail}"),
            Error::Io { detail } => write!(f, "i/o error: {detail}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io { detail: e.to_string() }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse { detail: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
