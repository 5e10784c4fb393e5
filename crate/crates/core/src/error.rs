use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("proximal operator returned a non-finite point (step {step})")]
    ProxFailure { step: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("auto-adapt gave up after {doublings} doublings (last kappa {kappa:e})")]
    DoublingCap { kappa: f64, doublings: u32 },

    #[error("stopping criteria not met at outer iteration {k} after {iterations} inner iterations")]
    CriteriaNotMet { k: usize, iterations: usize },

    #[error("inner elastic-net solve did not converge within {sweeps} sweeps")]
    InnerSolve { sweeps: usize },
}
