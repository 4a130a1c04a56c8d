use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("kinematic domain error: {0}")]
    KinematicDomain(String),

    #[error(
        "quadrature did not converge: value {value:e}, error estimate {error:e} after {subdivisions} subdivisions"
    )]
    QuadratureNotConverged {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("matrix exponential did not converge after {terms} series terms")]
    ExponentialNotConverged { terms: usize },

    #[error("Fock truncation leak: top-band population {population:e} exceeds {threshold:e} at t = {time}")]
    TruncationLeak { population: f64, threshold: f64, time: f64 },

    #[error("fit rejected: {0}")]
    FitRejected(String),

    #[error("photon propagator pole: q^2 = 0")]
    PhotonPole,

    #[error("unsupported spatial dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {value}")))
    }
}
