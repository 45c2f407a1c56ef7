use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} must be finite")]
    NonFinite { what: &'static str },

    #[error("{what} out of range: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("kappa = {kappa} must exceed d - 2 = {floor} in dimension {dim}")]
    KappaTooSmall { kappa: f64, floor: f64, dim: u32 },

    #[error("eps = {eps} outside (0, {bound})")]
    EpsOutOfRange { eps: f64, bound: f64 },

    #[error("start and end points coincide")]
    CoincidentPoints,

    #[error("quadrature did not reach relative tolerance {requested:e}; achieved {achieved:e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    #[error("additive functional overflowed to a non-finite value at step {step}")]
    NonFiniteSum { step: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("scan exhausted after {limit} terms without satisfying the target inequality")]
    ScanExhausted { limit: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Reject vectors with NaN/inf coordinates up front; every sampler calls this.
pub fn check_finite(what: &'static str, xs: &[f64]) -> Result<()> {
    if xs.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub fn check_finite_scalar(what: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub fn check_positive(what: &'static str, x: f64) -> Result<()> {
    check_finite_scalar(what, x)?;
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            detail: format!("{x} is not positive"),
        })
    }
}
