use thiserror::Error;

/// Errors produced by the library.
///
/// Variants fall into two groups: input errors (bad arguments, malformed
/// files) and [`Error::Invariant`], which signals that an internal identity
/// the construction relies on did not hold.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unequal lengths: {left} vs {right}")]
    UnequalLengths { left: usize, right: usize },

    #[error("invalid bit {found:?} at position {position}")]
    InvalidBit { position: usize, found: char },

    #[error("multiplicity undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("grid must have at least 8 points, got {0}")]
    InvalidGrid(usize),

    #[error("invalid deletion probability {0:?}: must lie in [0, 1)")]
    InvalidProbability(String),

    #[error("k must be odd and positive, got {0}")]
    InvalidOrder(i64),

    #[error("order {k} exceeds the supported maximum {max}")]
    OrderTooLarge { k: u32, max: u32 },

    #[error("potential index {k} out of range for strings of length {n}")]
    PotentialOutOfRange { k: usize, n: usize },

    #[error("strings must differ")]
    IdenticalStrings,

    #[error("Hamming distance {actual} exceeds the bound {bound}")]
    HammingBoundExceeded { actual: usize, bound: usize },

    #[error("trace batch is empty")]
    EmptyBatch,

    #[error("trace batch has source length {batch}, strings have length {strings}")]
    BatchLengthMismatch { batch: usize, strings: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of internal identities, as opposed to bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
