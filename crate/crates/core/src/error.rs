use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("operation not supported for {family} meshes: {what}")]
    UnsupportedFamily { family: String, what: &'static str },

    #[error("element {element} is degenerate (jacobian determinant {det:e})")]
    DegenerateElement { element: usize, det: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("density {value} of element {element} outside [{min}, 1]")]
    DensityOutOfRange { element: usize, value: f64, min: f64 },

    #[error("inconsistent mesh topology: {0}")]
    Topology(String),

    #[error("invalid load case: {0}")]
    InvalidLoadCase(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("cholesky factorization failed: non-positive pivot at column {index}")]
    NonPositivePivot { index: usize },

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("linear algebra backend: {0}")]
    Backend(String),

    #[error("optimality criteria bisection failed after {iterations} iterations, bracket [{lo:e}, {hi:e}]")]
    Bisection { iterations: usize, lo: f64, hi: f64 },

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
