//! Crate-wide error type.

use crate::exprdsl::{EvalError, ParseError};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    /// A coefficient function produced a fault or a non-finite value.
    #[error("coefficient `{name}` failed at x = {x}: {detail}")]
    Coefficient { name: String, x: f64, detail: String },

    /// Special-function parameter pole (e.g. Kummer b a non-positive integer).
    #[error("special function parameter pole: {0}")]
    ParameterPole(String),

    /// A result left the representable range; a log-scaled entry point exists.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Argument outside a function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature failed, usually on a non-finite integrand.
    #[error("quadrature failure on [{a}, {b}]: {detail}")]
    Quadrature { a: f64, b: f64, detail: String },

    /// The ODE integrator's step size collapsed (stiffness or a coefficient
    /// singularity) at the reported location.
    #[error("step size underflow near u = {location} (state x = {x}): {detail}")]
    StepSizeUnderflow { location: f64, x: f64, detail: String },

    /// A bisection bracket could not be established.
    #[error("bracket not found: {0}")]
    BracketNotFound(String),

    /// A theorem hypothesis required by the requested operation fails.
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    /// The provided solution grid does not cover the requested depth schedule.
    #[error("solution too shallow: {0}")]
    ShallowSolution(String),

    /// An indeterminate verdict blocks the requested operation.
    #[error("indeterminate: {0}")]
    Indeterminate(String),

    /// Invalid inputs (model construction, configuration values).
    #[error("validation error: {0}")]
    Validation(String),

    /// Requested value is not provided by a closed form.
    #[error("not available: {0}")]
    NotAvailable(String),
}

impl Error {
    pub fn coefficient(name: &str, x: f64, detail: impl Into<String>) -> Self {
        Error::Coefficient {
            name: name.to_string(),
            x,
            detail: detail.into(),
        }
    }

    /// True when the error reflects an honest tri-state outcome rather than
    /// a failure; the CLI maps these to a dedicated exit code.
    pub fn is_indeterminate(&self) -> bool {
        matches!(self, Error::Indeterminate(_))
    }
}
