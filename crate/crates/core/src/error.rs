use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("point {0} appears more than once")]
    RepeatedPoint(usize),

    #[error("point {point} is out of range for degree {degree}")]
    OutOfRange { point: usize, degree: usize },

    #[error("malformed cycle notation: {0}")]
    Malformed(String),

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: String, cap: u64 },

    #[error("fixed-point sum {sum} is not divisible by group order {order}")]
    NonIntegerAverage { sum: String, order: String },

    #[error("estimated {estimated} group elements exceed the element budget {budget}")]
    LongRunning { estimated: String, budget: u64 },

    #[error("division table computed up to j={have}, need j={need}")]
    Insufficient { have: usize, need: usize },

    #[error("unknown group family `{0}`")]
    UnknownFamily(String),

    #[error("bad group parameter: {0}")]
    BadParameter(String),

    #[error("file not found: {0}")]
    FileNotFound(String),

    #[error("cannot parse generator file: {0}")]
    FileParse(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
