use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("series have incompatible truncation boxes")]
    TruncationMismatch,

    #[error("exponent {exponent:?} lies outside the truncation box {bounds:?}")]
    OutsideTruncation {
        exponent: Vec<u64>,
        bounds: Vec<u64>,
    },

    #[error("exp of a series with nonzero constant term is not representable in exact mode")]
    ExactExpOfConstant,

    #[error(
        "input series is truncated at degree {available} in variable {var}, \
         but degree {required} is needed"
    )]
    InsufficientTruncation {
        var: usize,
        required: u64,
        available: u64,
    },

    #[error("differentiating {order} times in variable {var} exhausts its truncation bound {bound}")]
    TruncationExhausted { var: usize, order: u64, bound: u64 },

    #[error("fiber is unbounded in variable {var}: column is zero and the support is infinite")]
    UnboundedFiber { var: usize },

    #[error("no point of the support maps to the requested value of Y")]
    EmptyFiber,

    #[error("P(Y = k) evaluated to zero although the fiber meets the support")]
    ZeroProbability,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("{0} is not supported in exact mode")]
    ExactModeUnsupported(&'static str),

    #[error("cannot parse number {0:?}")]
    ParseNumber(String),

    #[error("division by zero")]
    DivisionByZero,
}

impl Error {
    /// Short stable identifier used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Overflow(_) => "Overflow",
            Error::TruncationMismatch => "TruncationMismatch",
            Error::OutsideTruncation { .. } => "OutsideTruncation",
            Error::ExactExpOfConstant => "ExactExpOfConstant",
            Error::InsufficientTruncation { .. } => "InsufficientTruncation",
            Error::TruncationExhausted { .. } => "TruncationExhausted",
            Error::UnboundedFiber { .. } => "UnboundedFiber",
            Error::EmptyFiber => "EmptyFiber",
            Error::ZeroProbability => "ZeroProbability",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::ExactModeUnsupported(_) => "ExactModeUnsupported",
            Error::ParseNumber(_) => "ParseNumber",
            Error::DivisionByZero => "DivisionByZero",
        }
    }
}
