use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("reservoir correlation function vanishes at t = {t} (|C(t)/C(0)| = {modulus:e})")]
    PoleEncountered { t: f64, modulus: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e}) after {intervals} subintervals")]
    QuadratureFailure { tolerance: f64, estimate: f64, intervals: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("master-equation integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },
}

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidState(_)
                | Error::NotAState(_)
                | Error::DimensionMismatch { .. }
                | Error::InvalidParameter { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
