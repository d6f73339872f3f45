use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The Neumann series needs a nonzero coefficient at the origin.
    #[error("element has zero coefficient at the origin; Neumann inversion is inapplicable")]
    NotDiagonallyDominant,

    #[error("truncated operator is singular")]
    Singular,

    #[error("no convergence after {iterations} iterations (last estimate {last_estimate})")]
    NonConvergence { iterations: usize, last_estimate: f64 },

    #[error("support of size {found} is too small for a decay fit (need {required})")]
    InsufficientSupport { found: usize, required: usize },

    #[error("truncation with {rows} rows exceeds the cap of {cap}")]
    MemoryCap { rows: usize, cap: usize },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
