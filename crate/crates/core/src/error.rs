//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by spectrum construction, simulation, fitting and the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition (bad spin value, out-of-range t, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Problem size exceeds the configured qubit cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// Operands refer to different qubit counts or lengths.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numerical routine could not produce a trustworthy result.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Division by an exactly zero quantity.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// Time-to-solution is infinite because the ground-state overlap is zero.
    #[error("infinite TTS: ground-state overlap is zero")]
    InfiniteTts,

    /// Aggregation over traces where every trace failed to reach the target.
    #[error("empty summary: no trace reached the target")]
    EmptySummary,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A file did not match the expected format.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
