use thiserror::Error;

/// Shape and validity errors shared by the algebraic layer.
///
/// Classifier rejections are not errors of this kind; each classifier has its
/// own error type naming the step that failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group must have at least one factor")]
    EmptyGroup,
    #[error("group modulus must be >= 1, got {0}")]
    InvalidModulus(usize),
    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: String, right: String },
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("element coordinates {coords:?} do not fit group {group}")]
    BadElement { coords: Vec<usize>, group: String },
    #[error("operation requires a single cyclic factor, got {0}")]
    NotCyclic(String),
    #[error("black-box operator returned a signal on {found}, expected {expected}")]
    BlackBoxShape { expected: String, found: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
