//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by constructions and verifiers.
///
/// Failures that indicate a violated precondition on caller input are kept
/// distinct from failures that indicate an internal invariant broke, so the
/// CLI can map them to different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("angle parameter {0} is outside (0, pi)")]
    InvalidAlpha(f64),
    #[error("check failed: {condition}: {witness}")]
    CheckFailed { condition: String, witness: String },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("glued maps disagree on a shared point: {0}")]
    WellDefinedness(String),
    #[error("gluing point outside the domain intersection: {0}")]
    MissingZ(String),
    #[error("rotation profile is nonzero at or beyond t0 = {0}")]
    ProfileNotCompact(f64),
    #[error("tube radius {r} exceeds half the gap {half_gap}")]
    RadiusTooLarge { r: f64, half_gap: f64 },
    #[error("point outside every glued region: {0}")]
    OutsideDomain(String),
    #[error("net is not separated: {0}")]
    NetNotSeparated(String),
    #[error("displacement {found} exceeds bound {bound}")]
    DisplacementExceeded { found: f64, bound: f64 },
    #[error("tile capacity exhausted: {0}")]
    Capacity(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("permutation is not tile-local: {0}")]
    NotTileLocal(String),
    #[error("separation violated: {0}")]
    SeparationViolated(String),
    #[error("slot assignment exhausted: {0}")]
    SlotExhausted(String),
    #[error("not a net: {0}")]
    NotANet(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("oracle boundary mismatch: {0}")]
    OracleBoundaryMismatch(String),
    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),
    #[error("degenerate trapezium: {0}")]
    DegenerateTrapezium(String),
    #[error("rung not found: {0}")]
    RungNotFound(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True when the error reports a failed construction or verification
    /// rather than input that breaks a precondition.
    pub fn is_check_failure(&self) -> bool {
        !matches!(
            self,
            Error::InvalidAlpha(_)
                | Error::ProfileNotCompact(_)
                | Error::RadiusTooLarge { .. }
                | Error::NetNotSeparated(_)
                | Error::DisplacementExceeded { .. }
                | Error::HypothesisViolated(_)
                | Error::NotTileLocal(_)
                | Error::SeparationViolated(_)
                | Error::NotANet(_)
                | Error::WindowTooSmall(_)
                | Error::DegenerateTrapezium(_)
                | Error::InvalidInput(_)
        )
    }

    pub(crate) fn check(condition: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::CheckFailed {
            condition: condition.into(),
            witness: witness.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
