use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at node {0}")]
    NonFinite(usize),
    #[error("state is identically zero")]
    ZeroState,
    #[error("nonlinear term vanishes; cannot project onto the Nehari manifold")]
    DegenerateNonlinearity,
    #[error("state is off the Nehari manifold (|tau| = {tau:e}, allowed {allowed:e})")]
    OffManifold { tau: f64, allowed: f64 },
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("parameters outside the formula's scope: {0}")]
    OutOfScope(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("linear system is not positive definite at row {0}")]
    NotPositiveDefinite(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
