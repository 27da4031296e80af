use thiserror::Error;

use crate::transition::ArcIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown arc index `{0}`")]
    UnknownIndex(ArcIndex),

    #[error("truncation around `{0}` is empty")]
    EmptyTruncation(ArcIndex),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is reducible: {0}")]
    Reducible(String),

    #[error("vector is not summable: {0}")]
    NotSummable(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("no entry for arc `{0}` in the supplied vector")]
    MissingEntry(ArcIndex),

    #[error("word {0} is not admissible")]
    Inadmissible(String),

    #[error("map specification is invalid: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
