//! Error taxonomy shared by every module of the crate.

/// Crate-wide error type.
///
/// Variants are grouped by what the caller did wrong (or what the data
/// made impossible), not by which module raised them:
///
/// * [`Error::InvalidParameter`] — a scalar argument violates its domain
///   (non-positive gamma shape, zero dimension, ...).
/// * [`Error::InvalidInput`] — structured input data is malformed
///   (non-finite matrix entries, mismatched lengths).
/// * [`Error::Domain`] — a formula is evaluated outside the region where
///   it is defined (θ ≤ 1 for the θ-dependent scale, w ≤ 0 for the
///   asymptotic shift, ...).
/// * [`Error::Regime`] — an edge-process quantity was requested outside
///   the real-root regime (i − 1) ≤ N·θ², where the characteristic roots
///   of the determinant recurrence become complex.
/// * [`Error::SingularDeterminant`] — an exactly-zero determinant cannot
///   be standardized (its log-magnitude is −∞).
/// * [`Error::StieltjesSingularity`] — an eigenvalue coincides exactly
///   with the evaluation point of the resolvent sums.
/// * [`Error::InsufficientData`] — a summary statistic needs more samples
///   than were supplied.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("regime error: {0}")]
    Regime(String),
    #[error("singular determinant: sign is zero, log-magnitude is -infinity")]
    SingularDeterminant,
    #[error("singularity: an eigenvalue coincides exactly with the resolvent evaluation point")]
    StieltjesSingularity,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
