use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("empty matrix: {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("restricted Gram matrix of size {size} is numerically singular")]
    SingularSystem { size: usize },

    #[error("X^T y is identically zero; the response carries no signal")]
    DegenerateResponse,

    #[error("solution path is empty")]
    EmptyPath,

    #[error("generalized Newton system is singular")]
    SingularNewtonSystem,

    #[error("correlation parameter must lie in [0, 1), got {0}")]
    InvalidRho(f64),

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("support size {t} is invalid for dimension {p}")]
    InvalidT { t: usize, p: usize },

    #[error("true coefficient vector is zero; relative error is undefined")]
    ZeroTruth,

    #[error("at knot {knot}: {source}")]
    Knot {
        knot: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips any knot annotation.
    pub fn root(&self) -> &Error {
        match self {
            Error::Knot { source, .. } => source.root(),
            other => other,
        }
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveLambda(lambda))
    }
}
