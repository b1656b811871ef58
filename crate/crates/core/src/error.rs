use thiserror::Error;

/// Errors raised by the geometric and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric is singular or has the wrong signature at x = {x:?}")]
    SingularMetric { x: [f64; 4] },
    #[error("point {x:?} lies outside the chart domain: {reason}")]
    ChartDomain { x: [f64; 4], reason: String },
    #[error("phase point is not timelike: ĝ00 = {g00_hat:e}")]
    NotTimelike { g00_hat: f64 },
    #[error("model has no electromagnetic field")]
    MissingEmField,
    #[error("model has no electromagnetic potential")]
    MissingPotential,
    #[error("observer is not adapted to the chart at x = {x:?}")]
    ObserverNotAdapted { x: [f64; 4] },
    #[error("worldline stopped being timelike near x0 = {x0}")]
    TimelikeLost { x0: f64 },
    #[error("worldline left the chart near x0 = {x0}")]
    ChartExit { x0: f64 },
    #[error("integration step failed at x0 = {x0}: {reason}")]
    StepFailure { x0: f64, reason: String },
    #[error("jet action denominator vanishes ({value:e})")]
    DegenerateDenominator { value: f64 },
    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
