use thiserror::Error;

/// Errors produced by construction, evaluation, and solvers in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A model or run parameter violated its domain constraint.
    #[error("invalid parameter {name}: {value} ({requirement})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A time argument fell outside the simulated horizon.
    #[error("time {t} outside horizon [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    /// Event times were not strictly increasing inside (0, horizon].
    #[error("event times must be strictly increasing within (0, horizon]")]
    MalformedEventTimes,

    /// A sampled path grid or its values violated the declared path kind.
    #[error("malformed sampled path: {0}")]
    MalformedPath(&'static str),

    /// A Monte Carlo estimator could not produce a finite value.
    #[error("estimator failure: {0}")]
    EstimatorFailure(&'static str),

    /// The moment-generating-function flow exploded before the horizon.
    #[error("MGF flow blew up at t = {at} (before horizon {horizon})")]
    BlowUp { at: f64, horizon: f64 },

    /// A root or minimum search exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations; bracket [{lo}, {hi}], residual {residual}")]
    NoConvergence {
        iterations: u32,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    /// A precondition of the requested operation does not hold.
    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
