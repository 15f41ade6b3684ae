//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, AiryError>;

#[derive(Debug, Error)]
pub enum AiryError {
    #[error("grid size {0} is not a power of two")]
    GridSizeNotPowerOfTwo(usize),

    #[error("domain length must be positive, got {0}")]
    NonPositiveLength(f64),

    #[error("time horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),

    #[error("time grid needs at least one step")]
    EmptyTimeGrid,

    #[error("sampled value is not finite at x = {x}")]
    NonFiniteSample { x: f64 },

    #[error("multiplier symbol '{label}' is not finite at wavenumber {xi}")]
    NonFiniteSymbol { label: String, xi: f64 },

    #[error("fractional derivative order must be nonnegative, got {0} (use bessel for smoothing orders)")]
    NegativeFractionalOrder(f64),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("overflow in quartic nonlinearity (max |f| = {max_abs:e})")]
    NonlinearityOverflow { max_abs: f64 },

    #[error("profile does not decay at the domain boundary (boundary/peak = {ratio:e}, tolerance {tol:e}); enlarge the domain")]
    InsufficientDecay { ratio: f64, tol: f64 },

    #[error("solver produced a non-finite value at step {step} (t = {t}); likely blow-up or instability")]
    SolverBlowUp { step: usize, t: f64 },

    #[error("zero datum: ball radius would vanish; the trivial datum is handled by the solver directly")]
    ZeroDatum,

    #[error("weight exponent r = {0} outside the admissible range [0, 1/6]")]
    WeightOutOfRange(f64),

    #[error("weight exponent r must be positive here (r = 0 is the unweighted path)")]
    ZeroWeight,

    #[error("norm exponent must be positive, got {0}")]
    NonPositiveExponent(f64),

    #[error("unknown estimate id '{0}'; valid ids are E1..E13")]
    UnknownEstimate(String),

    #[error("estimate {id} violated on '{member}': rhs = 0 while lhs = {lhs:e} (signals a bug)")]
    EstimateViolation {
        id: String,
        member: String,
        lhs: f64,
    },

    #[error("estimate {id} produced a non-finite ratio on '{member}'")]
    NonFiniteRatio { id: String, member: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
