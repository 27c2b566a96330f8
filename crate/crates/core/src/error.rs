use thiserror::Error;

/// Error type shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A run configuration failed validation; the message names the field.
    #[error("config validation: {0}")]
    Validation(String),
    /// A request exceeds a hard size limit (e.g. exact-diagonalization width).
    #[error("capacity: {0}")]
    Capacity(String),
    /// Fixed integrator step too large for the stiffest relaxation rate.
    #[error("step size {dt} exceeds stability bound {bound}")]
    StepSize { dt: f64, bound: f64 },
    /// The steady-state linear system is numerically singular.
    #[error("singular relaxation system (det = {det:e})")]
    SingularSystem { det: f64 },
    /// Evaluation at (or too close to) a pole of a closed-form expression.
    #[error("pole: {0}")]
    Pole(String),
    /// A trace or normalization came out unusable (zero denominator,
    /// imaginary residue above threshold, non-unit trace, ...).
    #[error("normalization: {0}")]
    Normalization(String),
    /// A cross-check deviated beyond its pinned tolerance.
    #[error("deviation above tolerance: {0}")]
    Deviation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
