use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("inconsistent series length at line {line}: expected {expected} values, found {found}")]
    InconsistentLength {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid value at line {line}, column {column}: {token:?}")]
    InvalidValue {
        line: usize,
        column: usize,
        token: String,
    },

    #[error("series too short: length {0}, need at least 3")]
    SeriesTooShort(usize),

    #[error("invalid interval [{start}, {end}] for representation of width {width}")]
    InvalidInterval {
        start: usize,
        end: usize,
        width: usize,
    },

    #[error("undefined score: fewer than two classes present")]
    UndefinedScore,

    #[error("segment too short: length {0}, need at least 2")]
    SegmentTooShort(usize),

    #[error("degenerate split: one side is empty")]
    DegenerateSplit,

    #[error("no candidate features")]
    NoCandidateFeatures,

    #[error("series length mismatch: model expects {expected}, got {found}")]
    SeriesLengthMismatch { expected: usize, found: usize },

    #[error("incompatible model: {0}")]
    IncompatibleModel(String),

    #[error("corrupt model: {0}")]
    CorruptModel(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("all datasets perfectly solved; weights undefined")]
    WeightsUndefined,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Coarse grouping used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Model,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidConfig(_) => ErrorKind::Usage,
            Error::IncompatibleModel(_) | Error::CorruptModel(_) => ErrorKind::Model,
            _ => ErrorKind::Data,
        }
    }
}
