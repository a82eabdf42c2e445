use thiserror::Error;

/// Errors raised by validated constructors and measurement operations.
///
/// Variants carry the numeric gap that tripped the check so callers
/// (and the CLI `validate` report) can show how far the input was from
/// satisfying the invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (max |A - A†| = {gap:e})")]
    NotHermitian { gap: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("vector is not unit norm (|‖v‖ - 1| = {gap:e})")]
    NotUnit { gap: f64 },

    #[error("trace deviates from one by {gap:e}")]
    NotUnitTrace { gap: f64 },

    #[error("vectors are not orthogonal (|⟨u,v⟩| = {overlap:e})")]
    NotOrthogonal { overlap: f64 },

    #[error("invalid weights: {reason}")]
    BadWeights { reason: String },

    #[error("elements do not sum to identity (max deviation {gap:e})")]
    NotNormalized { gap: f64 },

    #[error("outcome set is empty")]
    EmptyOutcomeSet,

    #[error("duplicate outcome label `{label}`")]
    DuplicateLabel { label: String },

    #[error("unknown outcome label `{label}`")]
    UnknownLabel { label: String },

    #[error("{labels} outcome labels but {operators} operators")]
    OutcomeCountMismatch { labels: usize, operators: usize },

    #[error(
        "outcome `{label}` has probability {probability:e} ≤ tolerance; posterior state undefined"
    )]
    ZeroProbabilityOutcome { label: String, probability: f64 },

    #[error("first measurement must have exactly two outcomes (got {got})")]
    NotDichotomic { got: usize },

    #[error("degenerate overlap: {reason}")]
    DegenerateOverlap { reason: String },

    #[error("infeasible ensemble counts: {reason}")]
    InfeasibleCounts { reason: String },

    #[error("invalid context model: {reason}")]
    InvalidModel { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
