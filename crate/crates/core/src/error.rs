//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors surfaced by matrix construction, factorization, corpus ingestion
/// and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix entry was negative or non-finite.
    #[error("non-negativity violation at ({row}, {col}): {value}")]
    NonNegativityViolation { row: usize, col: usize, value: f64 },

    /// A coordinate fell outside the declared matrix dimensions.
    #[error("index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexError {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    /// Operand dimensions do not conform.
    #[error("shape mismatch: {0}")]
    ShapeError(String),

    /// A configuration value is unusable for the requested operation.
    #[error("config error: {0}")]
    ConfigError(String),

    /// A line of an input file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeError(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::ConfigError(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl ToString) -> Self {
        Error::ParseError {
            line,
            message: msg.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
