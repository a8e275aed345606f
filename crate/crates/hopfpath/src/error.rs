//! Error types shared across the kernel.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("label {label} out of range 0..={max}")]
    LabelOutOfRange { label: u8, max: u8 },
    #[error("entry {0} of the translation vector is not primitive")]
    NotPrimitive(usize),
    #[error("series precondition violated: {0}")]
    SeriesPrecondition(&'static str),
    #[error("operator image leaves the supplied truncated basis")]
    KeyOutsideBasis,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("diffusion coefficient must vanish on {0}")]
    DiffusionCondition(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("grid must be strictly increasing with at least two points")]
    DegenerateGrid,
    #[error("sampled lifts support levels up to 3, got {0}")]
    UnsupportedLevel(usize),
    #[error("trace lacks keys required by the operator (level {have} < required {need})")]
    LevelShortfall { have: usize, need: usize },
    #[error("flavor mismatch: expected {expected} trace")]
    FlavorMismatch { expected: &'static str },
    #[error("alpha must lie in (0, 1]")]
    BadAlpha,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Parse errors carry a byte offset into the source expression.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}
