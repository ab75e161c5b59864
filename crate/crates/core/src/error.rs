use thiserror::Error;

/// Errors raised by chain construction and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {index} out of range for a chain with {len} states")]
    StateOutOfRange { index: usize, len: usize },
    #[error("duplicate state label `{0}`")]
    DuplicateState(String),
    #[error("chain has no states")]
    Empty,
    #[error("row `{state}` has negative entry {value} towards `{target}`")]
    NegativeEntry { state: String, target: String, value: String },
    #[error("row `{state}` sums to {sum}, not 1")]
    RowSum { state: String, sum: String },
    #[error("distribution sums to {0}, not 1")]
    DistSum(String),
    #[error("distribution has a negative weight at index {0}")]
    NegativeWeight(usize),
    #[error("distributions live on {left} and {right} states")]
    SizeMismatch { left: usize, right: usize },
    #[error("measure is not invariant (residual {0})")]
    NotInvariant(String),
    #[error("product space has {pairs} pairs, above the exact-mode cap of {cap}; use Monte Carlo mode")]
    ExactCapExceeded { pairs: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no off-diagonal pair has positive overlap within {n_max} steps: assumptions fail")]
    AssumptionsFail { n_max: usize },
    #[error("unknown gallery entry `{0}`")]
    UnknownGallery(String),
    #[error("singular linear system")]
    Singular,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
