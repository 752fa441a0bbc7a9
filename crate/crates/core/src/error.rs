use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ODE integration failed at lambda = {lambda}: step size underflow near x = {x}")]
    IntegrationFailure { lambda: f64, x: f64 },

    #[error("no sign change on bracket [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracketing { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("matrix is singular to working precision (smallest pivot {min_pivot:e})")]
    Conditioning { min_pivot: f64 },

    #[error("eigenvalue search lost track of index {index}: {detail}")]
    MissedRoot { index: usize, detail: String },

    #[error("k = {value:e} at lambda = {lambda} is numerically zero")]
    DegenerateK { lambda: f64, value: f64 },

    #[error("lambda = {lambda} coincides with root {index} of the product")]
    DegenerateRoot { index: usize, lambda: f64 },

    #[error("spectral data inconsistent: {0}")]
    InconsistentData(String),

    #[error("reconstruction produced invalid coefficients: {0}")]
    InvalidReconstruction(String),

    #[error("two spectra are not ordered as expected: {0}")]
    Ordering(String),

    #[error("lambda = {lambda} is within {gap:e} of the pole at lambda_{index}")]
    Pole { index: usize, lambda: f64, gap: f64 },

    #[error("schema error in {context}: {message}")]
    Schema { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
