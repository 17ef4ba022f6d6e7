use std::path::PathBuf;

/// Errors raised by the workbench.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid word: digit {digit} at position {position} is not a positive integer")]
    InvalidWord { position: usize, digit: i64 },

    #[error("digit {digit} is not in the alphabet {alphabet}")]
    DigitOutsideAlphabet { digit: u32, alphabet: String },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("continued fraction of the empty word is undefined")]
    UndefinedValue,

    #[error("logarithm undefined for M = {0}; need M > 1")]
    UndefinedLog(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("infeasible parameters at {step}: {detail}")]
    Infeasible { step: &'static str, detail: String },

    #[error("layer {layer}: {source}")]
    Layer {
        layer: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("schedule too short: J = {0} after flooring")]
    ScheduleTooShort(i64),

    #[error("schedule identity violated: {0}")]
    ScheduleIdentity(String),

    #[error("no split window contains M = {0}")]
    NoSplit(f64),

    #[error("density bound undefined for an empty spectrum")]
    UndefinedBound,

    #[error("structural check failed: {0}")]
    Check(String),

    #[error("bound {0} exceeds the supported range")]
    TooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
