use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("data buffer of length {len} does not describe a {rows}x{cols} matrix")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("triangular factor is singular (diagonal {value} at index {index})")]
    SingularFactor { index: usize, value: f64 },

    #[error("label {0} is neither 0 nor 1")]
    InvalidLabel(u8),

    #[error("each class needs at least two rows (class 1: {n}, class 0: {m})")]
    SingleClass { n: usize, m: usize },

    #[error("training set contains a single class")]
    SingleClassTrainingSet,

    #[error("k = {k} is out of range for a training set of {rows} rows (need 1 <= k <= N-1)")]
    KTooLarge { k: usize, rows: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("probability {0} lies outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("a class-1 point lies outside the support of f")]
    PointOutsideSupportOfF,

    #[error("a class-0 point lies outside the support of g")]
    PointOutsideSupportOfG,

    #[error("{folds}-fold cross-validation needs every fold and its complement to hold both classes (class 1: {n}, class 0: {m})")]
    FoldTooSmall { folds: usize, n: usize, m: usize },

    #[error("median pairwise distance is zero; kernel bandwidth is degenerate")]
    DegenerateBandwidth,

    #[error("no term reaches the document-frequency threshold")]
    EmptyVocabulary,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the error signals data that violates a statistical contract
    /// (a degenerate class split, an invalid covariance, ...) rather than a
    /// malformed input or parameter.
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::SingularFactor { .. }
                | Error::SingleClass { .. }
                | Error::SingleClassTrainingSet
                | Error::KTooLarge { .. }
                | Error::PointOutsideSupportOfF
                | Error::PointOutsideSupportOfG
                | Error::FoldTooSmall { .. }
                | Error::DegenerateBandwidth
                | Error::EmptyVocabulary
                | Error::ProbabilityOutOfRange(_)
        )
    }
}
