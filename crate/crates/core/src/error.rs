use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} out of range [2, 2^31]")]
    ModulusOutOfRange(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field order {p}^{m} exceeds 2^31")]
    FieldTooLarge { p: u64, m: u32 },

    #[error("invalid modulus polynomial: {0}")]
    BadModulus(String),

    #[error("operation requires a {expected} group")]
    WrongGroupKind { expected: &'static str },

    #[error("element {0} is not a unit")]
    NotUnit(u64),

    #[error("element {elem} out of range for group of order {order}")]
    ElementOutOfRange { elem: u64, order: u64 },

    #[error("{0} does not exactly divide the modulus")]
    NotExactDivisor(u64),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("functions live on different groups")]
    GroupMismatch,

    #[error("norm exponent must be >= 1, got {0}")]
    BadExponent(f64),

    #[error("polynomial has degree 0")]
    ConstantPolynomial,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("convolution entry {value} is not within {tol} of an integer")]
    IntegerGuard { value: f64, tol: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
