use alloc::string::String;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("odd power of u survives; value is not in Q(v)")]
    OddHalfPower,
    #[error("denominator vanishes at v = sqrt(q)")]
    PoleAtSqrtQ,
    #[error("not a square in Q(u): {0}")]
    NotASquare(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
    #[error("invalid orientation: {0}")]
    InvalidOrientation(String),
    #[error("unsupported diagram: {0}")]
    UnsupportedDiagram(String),
    #[error("node {0} is not a sink")]
    NotASink(String),
    #[error("rewriting cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no solution in the candidate span")]
    Unsolvable,
    #[error("rank cap exceeded: {0}")]
    RankCapExceeded(String),
    #[error("size cap exceeded: {0}")]
    SizeCapExceeded(String),
    #[error("insufficient samples for interpolation")]
    InsufficientSamples,
    #[error("{0}")]
    Other(String),
}

pub type CoreResult<T> = Result<T, CoreError>;
