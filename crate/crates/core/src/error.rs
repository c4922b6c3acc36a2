use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("invalid quench configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("buffer length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    /// A gapless mode whose occupation bracket does not cancel the 1/ω pole.
    #[error("singular mode at q = {q}: omega = 0 but 1 - 2<I_q> = {bracket}")]
    SingularMode { q: f64, bracket: f64 },

    #[error("grid too coarse: {points} points, need at least {required}")]
    GridTooCoarse { points: usize, required: usize },

    #[error("curves labelled {first} and {second} do not cross on the grid")]
    NoCrossing { first: f64, second: f64 },

    #[error("rescaled curves share no common window at b_c = {b_c}")]
    EmptyOverlap { b_c: f64 },

    #[error("Lanczos did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("degenerate Binder denominator: <M^2> = {m2:e}")]
    DegenerateDenominator { m2: f64 },

    #[error("state of {sites} sites needs {requested} bytes, budget is {budget} bytes")]
    MemoryBudget { sites: usize, requested: u64, budget: u64 },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical failures as opposed to bad input or resource limits.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMode { .. }
                | Error::NoCrossing { .. }
                | Error::EmptyOverlap { .. }
                | Error::NotConverged { .. }
                | Error::DegenerateDenominator { .. }
        )
    }
}
