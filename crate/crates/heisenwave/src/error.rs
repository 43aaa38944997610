use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("scale must be strictly positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("heat time must be at least {min}, got {got}")]
    HeatTimeOutOfRange { got: f64, min: f64 },
    #[error("window requires 0 < eps <= A, got eps={eps}, A={a}")]
    InvalidWindow { eps: f64, a: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("quadrature did not converge at {point:?}: doubling nodes moved the value by {delta:e}")]
    QuadratureNonConvergence { point: [f64; 4], delta: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid scale lattice: {0}")]
    InvalidLattice(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
