//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, validation, simulation, and planning.
#[derive(Debug, Error)]
pub enum Error {
    /// A text input (circuit, Hamiltonian, graph, or config) failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An input was well-formed but semantically invalid (bad qubit index,
    /// inconsistent parameter binding, unsupported option, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// A resource guard tripped: the computation would exceed a hard size or
    /// stability limit (monomial blow-up, non-invertible readout matrix,
    /// too many qubits for dense simulation).
    #[error("numeric guard: {0}")]
    NumericGuard(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Convenience constructor for parse errors.
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Convenience constructor for validation errors.
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Convenience constructor for numeric-guard errors.
    pub fn guard(msg: impl Into<String>) -> Self {
        Error::NumericGuard(msg.into())
    }

    /// Process exit code for this error class: 2 for input/config problems,
    /// 3 for numeric guards, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Validation(_) | Error::Json(_) => 2,
            Error::NumericGuard(_) => 3,
            Error::Io(_) => 1,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
