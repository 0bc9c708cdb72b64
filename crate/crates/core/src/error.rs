use thiserror::Error;

/// Errors surfaced by field construction, linear algebra, encoding, and repair.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),

    #[error("field of order {order} exceeds the cap of {cap} elements")]
    SizeCap { order: u64, cap: u64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("rank-deficient input: {0}")]
    RankError(&'static str),

    #[error("message degree exceeds code dimension")]
    DegreeError,

    #[error("shape mismatch: {0}")]
    ShapeError(&'static str),

    #[error("bad erasure pattern: {0}")]
    PatternError(&'static str),

    #[error("extension degree {t} is not divisible by the field characteristic {ch}")]
    DivisibilityError { t: u32, ch: u32 },

    #[error("erasure triple is not correctable at low bandwidth")]
    NotCorrectable,

    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
