use thiserror::Error;

use crate::witness::StructureClass;
use crate::ProcessId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid witness prestructure: {0}")]
    InvalidPrestructure(String),

    #[error("expected at least a {expected:?}, found {found:?}")]
    WrongClass {
        expected: StructureClass,
        found: StructureClass,
    },

    #[error("invalid trace form: {0}")]
    InvalidTraceForm(String),

    #[error("process {0} is not in the support")]
    NotInSupport(ProcessId),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("permutation is not a bijection: {0}")]
    NotBijective(String),

    #[error("round counter has empty support")]
    EmptySupport,

    #[error("counter {counter} exceeds limits ({reason}); raise the caps or use --force")]
    LimitExceeded { counter: String, reason: String },

    #[error("{key} is not a simplex of P{counter}")]
    NotASimplex { key: String, counter: String },

    #[error("invalid chromatic simplex: {0}")]
    InvalidChromatic(String),

    #[error("invalid execution: {0}")]
    InvalidExecution(String),

    #[error("invalid witness poset: {0}")]
    InvalidPoset(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
