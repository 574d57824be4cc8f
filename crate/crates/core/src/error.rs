//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A coupling strength, time, or tolerance is non-finite or out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A mode set is empty, out of range, duplicated, or parties overlap.
    #[error("invalid mode set: {0}")]
    InvalidModes(String),

    /// An eigensolver or factorization missed its accuracy target.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A matrix that must be positive definite is not; usually indicates an
    /// unphysical covariance matrix upstream.
    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// The pre-scan for a threshold search found zero or several sign
    /// changes where exactly one was required.
    #[error(
        "ambiguous threshold on [{from}, {to}]: {} sign change(s), brackets {brackets:?}",
        .brackets.len()
    )]
    AmbiguousThreshold {
        from: f64,
        to: f64,
        brackets: Vec<(f64, f64)>,
    },

    /// The scanned quantity crosses once, but in the opposite sense to the
    /// requested predicate (e.g. `appears` where the value vanishes).
    #[error("threshold predicate '{predicate}' crosses in the wrong direction on [{from}, {to}]")]
    ThresholdOrientation {
        predicate: &'static str,
        from: f64,
        to: f64,
    },
}
