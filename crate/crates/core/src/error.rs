use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex index {index} out of range for graph with {vertex_count} vertices")]
    IndexOutOfRange { index: usize, vertex_count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not unitary: max |U^dag U - I| = {defect:e}")]
    NotUnitary { defect: f64 },

    #[error("Kraus operators are not trace preserving: max |sum K^dag K - I| = {defect:e}")]
    NotTracePreserving { defect: f64 },

    #[error("locality violation: entry (m={to}, n={from}) has magnitude {magnitude:e} but edge {from}->{to} is absent")]
    EdgeViolation { from: usize, to: usize, magnitude: f64 },

    #[error("{what} is not normalized: {detail}")]
    Normalization { what: String, detail: String },

    #[error("no local flow exists: {0}")]
    Infeasible(String),

    #[error("cut crosses edge {from}->{to}; cross-capacities must vanish")]
    InvalidCut { from: usize, to: usize },

    #[error("instance too large for enumeration: {vertices} vertices exceeds cap {cap}")]
    TooLarge { vertices: usize, cap: usize },

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
