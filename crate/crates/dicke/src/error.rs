use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter or input violates an invariant.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// The adaptive integrator could not make progress (step size underflow).
    #[error("step size underflow at t = {t:.6e} (dt = {dt:.3e})")]
    StepSizeUnderflow { t: f64, dt: f64 },

    /// No steady-state root was found within the iteration budget.
    #[error("no steady-state root found: {0}")]
    NoRoot(String),

    /// Trace of the density matrix drifted beyond the abort threshold.
    #[error("trace drift {drift:.3e} exceeds bound at t = {t:.6e}")]
    TraceDrift { t: f64, drift: f64 },

    /// An operation was called outside its supported regime.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A numerical consistency check failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Configuration file problems (parse errors, bad keys).
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
