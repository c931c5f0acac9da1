use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("functions live on different grids or have different component counts")]
    GridMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point {0} is on the real axis")]
    RealAxis(Complex64),
    #[error("z = 0 is a branch point")]
    BranchPoint,
    #[error("{0} is not supported")]
    Unsupported(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("quadrature tail estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureTail { estimate: f64, tolerance: f64 },
    #[error("{point} is not a pole (minimum {minimum:.3e})")]
    NotAPole { point: Complex64, minimum: f64 },
    #[error("numerical rank collapse: {0}")]
    RankCollapse(String),
    #[error("model spec: {0}")]
    ModelSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
