use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("envelope has zero area")]
    ZeroArea,

    #[error("quadrature did not converge (last relative change {last_change:e})")]
    QuadratureDiverged { last_change: f64 },

    #[error("step count {steps} is below the resolution floor {required}")]
    StepResolution { steps: usize, required: usize },

    #[error("input state has excited-state amplitude {amplitude:e}")]
    ExcitedInput { amplitude: f64 },

    #[error("norm drifted by {deviation:e} during propagation")]
    NormDrift { deviation: f64 },

    #[error("fidelity changed by {change:e} under step refinement (tolerance {tolerance:e})")]
    NotConverged { change: f64, tolerance: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for violations of a numerical contract (unitarity, convergence, resolution),
    /// as opposed to rejected user input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::QuadratureDiverged { .. }
                | Error::NormDrift { .. }
                | Error::StepResolution { .. }
                | Error::NotConverged { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
