//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowLabError {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally invalid parameter (wrong count, negative size, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A threshold pair was ordered the wrong way round.
    #[error("threshold ordering: {0}")]
    ThresholdOrdering(String),

    /// Adaptive quadrature could not meet its tolerance.
    #[error("quadrature failed on [{a}, {b}]: tolerance {tol:e} unmet at depth {depth}")]
    QuadratureFailure { a: f64, b: f64, tol: f64, depth: usize },

    /// The adaptive ODE integrator gave up.
    #[error("ode solver failure: {0}")]
    OdeFailure(String),

    /// A trajectory coordinate exceeded the overflow guard or became NaN.
    #[error("simulation overflow at step {step}, point {point}: {detail}")]
    Overflow { step: usize, point: usize, detail: String },

    /// Rejection sampling or pair sampling produced no usable draws.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// Least-squares fit on a degenerate design.
    #[error("regression failure: {0}")]
    Regression(String),

    /// Unknown corpus field name.
    #[error("unknown field name: {0}")]
    UnknownField(String),

    /// Configuration file could not be parsed; names the offending key.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FlowLabError>;
