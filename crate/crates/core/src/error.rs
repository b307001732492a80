use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("function `{name}` takes exactly one argument (byte {offset})")]
    ArityMismatch { name: String, offset: usize },

    #[error("evaluation domain error at t = {t}: {message}")]
    EvalDomain { t: f64, message: String },

    #[error("warping function is not positive at t = {0}")]
    NotPositive(f64),

    #[error("warping function is not even at t = {0}")]
    NotEven(f64),

    #[error("m' vanishes identically near t = 0")]
    DegenerateAtZero,

    #[error("{what} = {value} outside valid range ({lo}, {hi})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("quadrature failed to reach the requested accuracy (estimate {estimate:e})")]
    QuadratureStall { estimate: f64 },

    #[error("integrator step size underflow at s = {s}")]
    StepFailure { s: f64 },

    #[error("geodesic with nu = {nu} does not return to the equator")]
    NoReturn { nu: f64 },

    #[error("surface does not satisfy the structure-theorem hypotheses")]
    HypothesesNotVerified,

    #[error("no two-minimizer tie found on the parallel in (0, pi)")]
    TieNotFound,

    #[error("no geodesic connection to the target found within the length budget")]
    NoHit,

    #[error("invalid surface descriptor: {0}")]
    BadDescriptor(String),
}
