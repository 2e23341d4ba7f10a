use thiserror::Error;

/// Errors raised by the spectral pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("recurrence breaks down: b_{index} = 0")]
    RecurrenceBreakdown { index: usize },

    #[error("degenerate polynomial: {0}")]
    DegeneratePolynomial(String),

    #[error("root rejected: terminal residual {residual:e} exceeds {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("precision escalation failed: residual {residual:e} at {bits} bits")]
    PrecisionFailure { residual: f64, bits: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("selected root is not physical: {0}")]
    NotPhysical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
