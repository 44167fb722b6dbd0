use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },

    #[error("step size too coarse: dt * max_rate = {product:.4} exceeds {limit}")]
    StepTooCoarse { product: f64, limit: f64 },

    #[error("laser noise under-resolved: dt * linewidth = {product:.4} exceeds {limit}")]
    NoiseUnderResolved { product: f64, limit: f64 },

    #[error("Laplace transform has a pole at z = 0")]
    PoleAtOrigin,

    #[error("resonance denominator vanishes at z = {0}")]
    ResonanceDenominator(Complex64),

    #[error("singular resolvent at z = {0}")]
    SingularResolvent(Complex64),

    #[error(
        "correlation trace has not decayed: |g(tau_max) - g_inf| = {residual:e} >= {threshold:e}"
    )]
    UndecayedTrace { residual: f64, threshold: f64 },

    #[error("dressed decomposition defined only at resonance (detuning = {0})")]
    NonzeroDetuning(f64),

    #[error("n below statistical minimum ({min}): got {n}")]
    TooFewRealizations { n: usize, min: usize },

    #[error("insufficient relaxation: t_relax * slowest_rate = {product:.3} < {required}")]
    InsufficientRelaxation { product: f64, required: f64 },

    #[error("state not stationary after t = {t_max}")]
    NotStationary { t_max: f64 },

    #[error("grid too small: {points} points, need at least {min}")]
    GridTooSmall { points: usize, min: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
