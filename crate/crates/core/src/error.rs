use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode k-index {index} outside momentum grid of {len} points")]
    GridBounds { index: usize, len: usize },

    #[error("invalid momentum grid: {0}")]
    InvalidGrid(String),

    #[error("profile weights vanish on every grid point")]
    DegenerateProfile,

    #[error("tabulated profile queried at offset {x} outside sampled range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} for value {value:e}")]
    Quadrature { value: f64, estimate: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("trace {trace:e} too small to normalize")]
    DegenerateState { trace: f64 },

    #[error("selection rule violation: {0}")]
    SelectionRule(String),

    #[error("invalid sweep specification: {0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Quadrature { .. } | Error::DegenerateState { .. })
    }
}
