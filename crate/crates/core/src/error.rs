use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("{what} exceeded budget of {limit}")]
    Budget { what: &'static str, limit: usize },

    #[error("composition middle word overflowed both outer words by more than one letter")]
    MiddleOverflow,

    #[error("word-difference transition target {0} lies outside the difference set")]
    UnclosedDifferenceSet(String),

    #[error("automatic structure has not been verified")]
    NotVerified,

    #[error("word could not be reduced by the automatic structure")]
    ReductionFailed,

    #[error("correctness repair loop did not converge after {0} passes")]
    IterationCap(usize),

    #[error("correctness repair stalled: no new word differences could be derived")]
    RepairStalled,

    #[error("axiom check failed")]
    AxiomCheckFailed,

    #[error("corrupt checkpoint in {path}: {message}")]
    CorruptCheckpoint { path: PathBuf, message: String },

    #[error("temporary directory is locked by another run: {0}")]
    Locked(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error: 2 input, 3 resources,
    /// 4 verification, 5 checkpoint.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AlphabetMismatch(_)
            | Error::InvalidAlphabet(_)
            | Error::Parse { .. }
            | Error::InvalidPresentation(_) => 2,
            Error::Budget { .. } | Error::MiddleOverflow | Error::Locked(_) | Error::Io { .. } => 3,
            Error::UnclosedDifferenceSet(_)
            | Error::NotVerified
            | Error::ReductionFailed
            | Error::IterationCap(_)
            | Error::RepairStalled
            | Error::AxiomCheckFailed => 4,
            Error::CorruptCheckpoint { .. } => 5,
        }
    }
}
