use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("size guard: {what} has {size}, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("non-monotone iteration at step {step}: X_{step} is not contained in X_{next}", next = step + 1)]
    NonMonotone { step: usize },

    #[error("model carries no colour-permutation class structure")]
    NoClassStructure,

    #[error("unsupported construct for this operation: {0}")]
    Unsupported(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),

    #[error("announcement false at the point")]
    AnnouncementFalse,

    #[error("abstract simulation aborted: {0}")]
    SimulationAborted(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
