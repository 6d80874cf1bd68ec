use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid operating point: {0}")]
    InvalidOperatingPoint(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// Two independent routes to the same answer disagreed beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),

    #[error("integrator step size underflow at t={t}: state=({s}, {x1}, {x2})")]
    StepUnderflow { t: f64, s: f64, x1: f64, x2: f64 },
}
