use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A lemma or bound was invoked outside the range where it is valid.
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    /// The corner-point bound requires `t_hi <= 1/(2 - delta)`.
    #[error("corner bound invalid: {0}")]
    BoundInvalid(String),

    /// The requested partitions leave part of the target region uncovered.
    #[error("partitions leave a gap: {0}")]
    CoverageGap(String),

    #[error("subset enumeration needs {needed} subsets, cap is {cap}; use ric_monte_carlo")]
    EnumerationCap { needed: u128, cap: u128 },

    #[error("right-hand side is not in the range of the matrix (relative residual {0:.3e})")]
    Infeasible(f64),

    /// `h` vanishes off `T0`; such vectors are excluded from the tau ratio.
    #[error("h vanishes on the complement of T0")]
    ExcludedCase,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("linear algebra failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
