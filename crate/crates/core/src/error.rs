use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("lattice mismatch: fields live on different wavenumber lattices")]
    LatticeMismatch,

    #[error("field has a nonzero mean ({magnitude:e}); the Leray symbol is undefined at the zero mode")]
    NonzeroMean { magnitude: f64 },

    #[error("negative time {0} passed to the semigroup")]
    NegativeTime(f64),

    #[error("time {t} is not covered by the forcing samples (last sample at {last})")]
    TimeNotCovered { t: f64, last: f64 },

    #[error("time grids of the two trajectories differ")]
    GridMismatch,

    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("derivative order {k} leaves no resolvable signal after dealiasing")]
    UnresolvedDerivative { k: usize },

    #[error("time stepper blew up at t = {t}: norm grew from {before:e} to {after:e} in one step")]
    Blowup { t: f64, before: f64, after: f64 },

    #[error("Picard iteration did not converge after {iterations} iterations (last GX difference {last_diff:e})")]
    NotConverged { iterations: usize, last_diff: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
