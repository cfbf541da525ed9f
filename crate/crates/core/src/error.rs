use thiserror::Error;

/// Errors raised by the computational engine.
///
/// The variants are grouped the way callers react to them: structural and
/// degree problems are programming or input mistakes, resource errors mean a
/// configured cap was exceeded and the caller may retry with larger bounds.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ambient algebras differ: {0}")]
    Structural(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("exponent overflow")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
