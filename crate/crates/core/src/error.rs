use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands or arguments that do not fit together (mismatched primes, arities, moduli).
    #[error("usage error: {0}")]
    Usage(String),
    /// A mathematically undefined request (inverting a non-unit, a singular block).
    #[error("domain error: {0}")]
    Domain(String),
    /// A relation or construct the implementation does not handle.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An invariant of the implementation failed; always a bug.
    #[error("internal error: {0}")]
    Internal(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },
    /// A certificate document that cannot be decoded.
    #[error("malformed document: {0}")]
    Format(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
