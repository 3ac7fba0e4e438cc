use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    InvalidGridSize(usize),

    #[error("samples contain NaN or infinite values")]
    NonFiniteSamples,

    #[error("series band of {band} coefficients does not fit a grid of {grid} points")]
    BandExceedsGrid { band: usize, grid: usize },

    #[error("quadrature resolution {resolution} is below the grid size {grid}")]
    ResolutionTooLow { resolution: usize, grid: usize },

    #[error("grid sizes differ: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("knot map is not strictly increasing")]
    NotMonotone,

    #[error("function must be real-valued")]
    NotRealValued,

    #[error("radius profile must be strictly positive")]
    NonPositiveRadius,

    #[error("mollifier half-width {0} is outside (0, pi]")]
    InvalidHalfWidth(f64),

    #[error("not a probability measure: {0}")]
    NotProbability(String),

    #[error("weighted spectral mass never reached |k|/2 = {target} within the grid band (k = {k})")]
    NotReachedAtTruncation { k: i64, target: f64 },

    #[error("no convergence after {0} iterations (last update {1:.3e})")]
    NoConvergence(usize, f64),

    #[error("iteration left the monotone range")]
    StarConditionViolated,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
