use crate::exactcore::ExactError;

/// Errors surfaced by the computational modules.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("operator is not nilpotent")]
    NotNilpotent,
    #[error("primitive index {0} is negative")]
    NegativeIndex(i64),
    #[error("operator does not map F_{index} into F_{{index + 1}}")]
    FiltrationNotPreserved { index: i64 },
    #[error("strictness fails for a = {a}, b = {b}")]
    StrictnessPrereqFailed { a: u32, b: i64 },
    #[error("pairing is degenerate")]
    DegeneratePairing,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("missing stratum data for J = {0:?}")]
    MissingStratum(Vec<usize>),
    #[error("map shape mismatch: {0}")]
    MapShapeMismatch(String),
    #[error("assembled d1 does not square to zero")]
    D1SquareNonzero,
    #[error("missing Hodge data: {0}")]
    MissingHodgeData(String),
    #[error("missing Lefschetz data for J = {0:?}")]
    MissingLefschetzData(Vec<usize>),
    #[error("{0} is not an eigenvalue of the residue")]
    UnknownEigenvalue(String),
    #[error("truncation degree {degree} is too small, need at least {needed}")]
    TruncationTooSmall { degree: usize, needed: usize },
    #[error("quadrature did not converge: {0}")]
    QuadratureNonconvergence(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
