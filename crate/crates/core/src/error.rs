use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid boundary data: {0}")]
    InvalidBoundary(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("field shape {got} does not match grid shape {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("spectral: {0}")]
    Spectral(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("epsilon {eps:.6e} exceeds the admissible bound {eps_max:.6e}")]
    Inadmissible { eps: f64, eps_max: f64 },
    #[error("parameter outside its admissible window: {0}")]
    Window(String),
    #[error("non-finite value after step {step} at tau = {tau}")]
    NonFinite { step: u64, tau: f64 },
    #[error("flow did not reach the steady tolerance by tau = {tau} (residual {residual:.3e})")]
    NotConverged { tau: f64, residual: f64 },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
