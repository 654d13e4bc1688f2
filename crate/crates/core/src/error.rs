use thiserror::Error;

/// Errors raised by evaluation, integration and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gamma function pole at non-positive integer {0}")]
    GammaPole(f64),

    #[error("gamma function overflows at {0}")]
    GammaOverflow(f64),

    #[error("series did not converge within {max_terms} terms (x = {x})")]
    SeriesNonConvergence { x: f64, max_terms: usize },

    #[error("finite-difference step {step} is below the safe floor {floor}")]
    StepUnderflow { step: f64, floor: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("domain error at x = {x}: {reason}")]
    Domain { x: f64, reason: String },

    #[error("singular grid at x = {x}: value {value} outside the band [{lower}, {upper}]")]
    SingularGrid {
        x: f64,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("empty residual set")]
    EmptyResiduals,

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("quadrature did not reach tolerance {tol} on [{a}, {b}]")]
    QuadratureNonConvergence { a: f64, b: f64, tol: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("pole crossing at tau = {tau}: |denominator| = {magnitude}")]
    PoleCrossing { tau: f64, magnitude: f64 },

    #[error("field crosses zero at x = {x} (|F| = {value})")]
    ZeroCrossing { x: f64, value: f64 },

    #[error("non-positive field at x = {x} (F = {value})")]
    NonPositiveField { x: f64, value: f64 },

    #[error("insufficient time slices: need at least {needed}, got {got}")]
    InsufficientSlices { needed: usize, got: usize },

    #[error("instability detected at t = {t}: norm grew from {initial} to {current}")]
    Unstable { t: f64, initial: f64, current: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
