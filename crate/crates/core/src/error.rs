use std::path::PathBuf;

use thiserror::Error;

/// Failure modes of the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("length {0} is not a power of two (need >= 4)")]
    NotPowerOfTwo(usize),

    #[error("singular linear system (pivot ratio {ratio:.3e})")]
    SingularSystem { ratio: f64 },

    #[error("Newton iteration did not converge (last residual {residual:.3e} after {iterations} iterations)")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("insufficient data: need {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("step sizes do not form a halving sequence")]
    NonGeometric,

    #[error("zero denominator at index {0}")]
    ZeroDenominator(usize),

    #[error("critical point returns with period 2^{found} < 2^{requested}")]
    MinimalPeriodViolation { requested: u32, found: u32 },

    #[error("Fourier tail still too large at the mode budget of {n_max}")]
    ModeBudgetExceeded { n_max: usize },

    #[error("continuation step underflow at eps = {eps:.6e}")]
    StepUnderflow { eps: f64 },

    #[error("both branch sides converged to alpha = {alpha:.12}")]
    SideAmbiguity { alpha: f64 },

    #[error("cocycle vanishes on the grid (|m| = {value:.3e}); logarithm undefined")]
    LogSingularity { value: f64 },

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("rotation number {omega} is within 1e-12 of {p}/{q}")]
    RationalRotation { omega: f64, p: u64, q: u64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::RationalRotation { .. } => 2,
            _ => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io { path: path.into(), message: err.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
