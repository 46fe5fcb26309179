use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, SpectralError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpectralError {
    /// The spectral point lies on (or numerically on) the essential spectrum.
    #[error("spectral point {z} lies on the essential spectrum (distance {distance:e})")]
    BranchCut { z: Complex64, distance: f64 },

    #[error("argument out of domain: {0}")]
    DomainError(String),

    #[error("Möbius inverse has a pole at w = 1")]
    PoleAtOne,

    #[error("integral did not converge: {0}")]
    NonIntegrable(String),

    #[error("hypothesis violated: {0}")]
    ConditionViolated(String),

    #[error("dilation angle {phi} outside the analyticity sector (alpha = {alpha:?})")]
    AnalyticityViolation { phi: f64, alpha: Option<f64> },

    #[error("winding number could not be resolved: {0}")]
    WindingUnresolved(String),

    #[error("no unique intersection of the disk boundary with the essential spectrum at phi = {phi}")]
    NoIntersection { phi: f64 },

    #[error("invalid potential description: {0}")]
    InvalidPotential(String),
}

impl SpectralError {
    /// Failures of a numerical procedure, as opposed to rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SpectralError::NonIntegrable(_)
                | SpectralError::WindingUnresolved(_)
                | SpectralError::NoIntersection { .. }
        )
    }
}
