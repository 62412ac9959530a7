use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("missing @data section")]
    MissingData,

    #[error("empty data section")]
    EmptyData,

    #[error("row {row} has {found} cells, expected {expected}")]
    Arity { row: usize, expected: usize, found: usize },

    #[error("unknown nominal category `{value}` for attribute `{attribute}`")]
    UnknownCategory { attribute: String, value: String },

    #[error("non-numeric cell `{value}` in numeric column {column}")]
    NonNumeric { column: usize, value: String },

    #[error("fewer than 2 classes")]
    TooFewClasses,

    #[error("empty input")]
    EmptyInput,

    #[error("feature vector has {found} entries, model expects {expected}")]
    FeatureArity { expected: usize, found: usize },

    #[error("SMOTE needs ≥ 2 seeds, got {0}")]
    SmoteSeeds(usize),

    #[error("cannot draw {target} samples from {available}")]
    SampleSize { target: usize, available: usize },

    #[error("random balance needs at least 4 samples, got {0}")]
    RandomBalanceSize(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
