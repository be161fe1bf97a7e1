use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Variants split into validation problems (bad input) and numeric
/// failures (the input was fine but a computation could not finish).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not a concave nondecreasing curve: {0}")]
    NotConcave(String),
    #[error("hypothesis violated at t = {t}: {lhs} > {rhs}")]
    HypothesisViolated { t: f64, lhs: f64, rhs: f64 },
    #[error("LP iteration limit reached after {0} pivots")]
    IterationLimit(usize),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by the input rather than by the computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DimensionMismatch { .. }
                | Error::NonPositiveExponent(_)
                | Error::Unsupported(_)
                | Error::NotConcave(_)
        )
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            2
        } else {
            3
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
