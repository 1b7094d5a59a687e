use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vector or matrix has the wrong shape for the operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// An enumeration would test more candidates than the configured budget.
    #[error("enumeration budget exceeded: {candidates} candidates over limit {limit}")]
    Budget { candidates: u128, limit: u64 },

    /// The zero vector has no primitivity status.
    #[error("zero vector")]
    ZeroVector,

    /// The target set has no finite bounding box.
    #[error("unbounded region")]
    Unbounded,

    /// An estimator was asked to run with no samples.
    #[error("no samples")]
    NoSamples,

    /// Shrinking-window sampling is only valid for widths N^-beta with beta < 1/2.
    #[error("window too narrow: beta {beta} must be < 1/2")]
    WindowTooNarrow { beta: f64 },

    /// The closed form for P(EST > 0) only holds for A <= c/(1+c^2).
    #[error("outside validity range: A = {a} exceeds c/(1+c^2) = {limit}")]
    OutsideValidityRange { a: f64, limit: f64 },

    /// zeta(s) diverges for s < 2 (only integer arguments are supported).
    #[error("divergent: zeta requires s >= 2, got {s}")]
    Divergent { s: i64 },

    /// Sample moments need at least two observations.
    #[error("insufficient samples: need at least 2, got {got}")]
    InsufficientSamples { got: u64 },

    /// A constructor was handed parameters violating its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
