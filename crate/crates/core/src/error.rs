use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("potential is not available for {family} densities")]
    PotentialUnavailable { family: &'static str },

    #[error("quadrature failed for {context}: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailure {
        context: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("invalid stockyard: {0}")]
    InvalidStockyard(String),

    #[error("degenerate loop: total length {0:e} is below 1e-12")]
    DegenerateLoop(f64),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
