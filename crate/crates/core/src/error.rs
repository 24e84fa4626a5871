use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("adaptive quadrature did not converge: value {value}, error estimate {error_estimate:e} after {subdivisions} subdivisions")]
    NonConvergent {
        value: Complex64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("evaluation point hits a kernel pole (distance {distance:e})")]
    PoleHit { distance: f64 },

    #[error("curve tangent is undefined at u = {u}")]
    TangentUndefined { u: f64 },

    #[error("point {w} lies on the curve")]
    OnCurve { w: Complex64 },

    #[error("boundary limit did not converge after {levels} radii (last spread {spread:e})")]
    NotConverged { levels: usize, spread: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(w: Complex64, what: &str) -> Result<()> {
    if w.re.is_finite() && w.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{what} = {w}")))
    }
}
