use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported channel: {0}")]
    UnsupportedChannel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no in-gap eigenvalue available for shell {0}; enlarge the box or refine the grid")]
    NoBoundState(String),

    #[error("{solver} did not converge after {iterations} iterations")]
    NotConverged { solver: &'static str, iterations: usize },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("threshold {threshold} lies within {tolerance} of eigenvalue {eigenvalue}")]
    ThresholdCollision {
        threshold: f64,
        eigenvalue: f64,
        tolerance: f64,
    },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("degenerate in-gap eigenvalues in channel {0} cannot be ordered")]
    Degenerate(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("optimizer aborted: {0}")]
    Optimizer(String),

    #[error("configuration error at {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code used in reports and across the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::UnsupportedChannel(_) => "unsupported_channel",
            Error::Domain(_) => "domain",
            Error::NoBoundState(_) => "no_bound_state",
            Error::NotConverged { .. } => "not_converged",
            Error::Eigen(_) => "eigensolver",
            Error::ThresholdCollision { .. } => "threshold_collision",
            Error::Constraint(_) => "constraint",
            Error::Degenerate(_) => "degenerate",
            Error::Dimension(_) => "dimension",
            Error::Optimizer(_) => "optimizer",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
