use std::fmt;
use std::io;

/// Errors produced by the dataset, model, and runner layers.
#[derive(Debug)]
pub enum Error {
    Io(io::Error),
    /// A mapped column name is absent from the file header.
    MissingColumn(String),
    /// The file had a header but no data rows, or cleaning left < 2 rows.
    TooFewRows(usize),
    ParseCell { line: usize, column: String, value: String },
    LengthMismatch { expected: usize, actual: usize },
    DimensionMismatch { expected: usize, actual: usize },
    EmptyInput(&'static str),
    /// R^2 is undefined: zero target variance with non-zero residuals.
    UndefinedR2,
    InvalidParam(String),
    InvalidFoldCount { n: usize, k: usize },
    NonFinite(&'static str),
    /// Training loss became non-finite.
    Diverged,
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::MissingColumn(c) => write!(f, "missing column: {c}"),
            Error::TooFewRows(n) => write!(f, "too few rows: {n} (need at least 2)"),
            Error::ParseCell { line, column, value } => {
                write!(f, "line {line}: cannot parse '{value}' in column '{column}'")
            }
            Error::LengthMismatch { expected, actual } => {
                write!(f, "length mismatch: expected {expected}, got {actual}")
            }
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::UndefinedR2 => write!(f, "r2 undefined: zero target variance with non-zero residuals"),
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidFoldCount { n, k } => write!(f, "invalid fold count k={k} for n={n}"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::Diverged => write!(f, "training diverged: loss became non-finite"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
