use thiserror::Error;

/// Errors raised by the invariant engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime in [2, 2^31)")]
    NotPrime(u64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrices live over different prime fields ({0} vs {1})")]
    FieldMismatch(u32, u32),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("solution coordinate {index} is not an integer ({value})")]
    NonIntegralSolution { index: usize, value: String },

    #[error("solution coordinate {index} is negative ({value})")]
    NegativeMultiplicity { index: usize, value: String },

    #[error("unknown poset element {0}")]
    UnknownElement(String),

    #[error("slices {0} and {1} share the point {2}")]
    OverlappingSlices(usize, usize, String),

    #[error("a slice sequence needs at least two slices, got {0}")]
    TooFewSlices(usize),

    #[error("index range error: {0}")]
    RangeError(String),

    #[error("{0} is not below {1}")]
    NotComparable(String, String),

    #[error("modules live over different posets")]
    PosetMismatch,

    #[error("shift vector {0} has a negative coordinate")]
    NegativeShift(String),

    #[error("grid dimension mismatch ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("operation needs a {0}-indexed module")]
    WrongPosetKind(&'static str),

    #[error("invalid poset: {0}")]
    InvalidPoset(String),

    #[error("invalid interleaving certificate: {0}")]
    InvalidCertificate(String),

    #[error("module violates the functor law: {0}")]
    InvalidModule(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), message: message.into() }
    }
}
