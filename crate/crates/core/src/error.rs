use thiserror::Error;

/// Errors produced by the arithmetic and operator layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("p^M = {p}^{digits} does not fit the 56-bit limb size; lower the precision")]
    PrecisionTooLarge { p: u64, digits: u32 },
    #[error("ring context mismatch")]
    ContextMismatch,
    #[error("element is not a unit (valuation {0})")]
    NotUnit(u32),
    #[error("element is not divisible by p at its stated precision")]
    NotDivisible,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("exponent digit prefix too short: have {have} digits, need {need}")]
    InsufficientDigits { have: usize, need: usize },
    #[error("extension degree {0} is outside the configured bound")]
    DegreeOutOfRange(usize),
    #[error("field of order {p}^{degree} is too large to tabulate")]
    FieldTooLarge { p: u64, degree: usize },
    #[error("series constant term is not 1")]
    NotOneUnit,
    #[error("unramified context: {0} requires the ramified ring Z_q[pi]")]
    Unramified(&'static str),
    #[error("normalization violated at entry ({row}, {col}): {detail}")]
    Normalization { row: usize, col: usize, detail: String },
    #[error("ordinarity failure: fiber has {0} unit roots, expected exactly one")]
    NotOrdinary(usize),
    #[error("box [0, {bound}] drops coefficients of valuation below {precision}")]
    BoxTooSmall { bound: usize, precision: u32 },
    #[error("element does not lie in the base ring")]
    NotInBaseRing,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
