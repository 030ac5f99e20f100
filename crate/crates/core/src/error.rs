use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input point or index fell outside its allowed range.
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural invariant of a constructed value does not hold.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A refinement was requested that no partition can satisfy.
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by malformed or out-of-contract input, as
    /// opposed to I/O or environmental failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Invalid(_)
                | Error::Infeasible(_)
                | Error::Dimension { .. }
                | Error::Parse { .. }
                | Error::TooLarge(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
