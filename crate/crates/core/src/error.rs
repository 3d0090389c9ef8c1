use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not hermitian")]
    NotHermitian,

    #[error("right-hand side is not contained in the range")]
    NoSolution,

    #[error("functional is not flat: {0}")]
    NotFlat(String),

    #[error("functional is not positive semidefinite")]
    NotPsd,

    #[error("functional is not tip-maximal")]
    NotTipMaximal,

    #[error("extension obstructed: {0}")]
    ExtensionObstructed(String),

    /// A mathematical invariant that the construction guarantees was observed
    /// to fail. This is a bug (or a counterexample), never a user error.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
