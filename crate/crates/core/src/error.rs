use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("profile is not odd: |U(y) + U(-y)| = {defect:e}")]
    NotOdd { defect: f64 },

    #[error("profile is not strictly monotone (min U' = {min_slope:e})")]
    NotMonotone { min_slope: f64 },

    #[error("b0 = {b0} is not positive")]
    NonPositiveB0 { b0: f64 },

    #[error("grid spacing {spacing} exceeds the resolution limit {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("trial function is not normalized (L2 norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("field not resolved: grid halving changes the norm by {relative_change:.3e}")]
    UnresolvedField { relative_change: f64 },

    #[error("negative x-regularity requires zero x-mean, but |h_0| = {mean_norm:e}")]
    ZeroMeanViolation { mean_norm: f64 },

    #[error("field does not vanish at y0: |u(y0)| = {value:e}")]
    NonVanishing { value: f64 },

    #[error("exponent p = {p} outside the admissible range for s = {s}")]
    ExponentOutOfRange { p: f64, s: f64 },

    #[error("Newton iteration diverged at amplitude {amplitude} (residual {residual:e})")]
    NewtonDiverged {
        amplitude: f64,
        residual: f64,
        last_good: Option<Box<crate::steady::SteadyState>>,
    },

    #[error("linearization at the bifurcation point is not singular (defect {defect:e})")]
    BifurcationNotFound { defect: f64 },

    #[error("period bracket invalid: T(a1) = {t_low}, T(a2) = {t_high}, target {target}")]
    BracketInvalid { t_low: f64, t_high: f64, target: f64 },

    #[error("degenerate Hessian at ({xi}, {y}): det = {det:e}")]
    DegenerateHessian { xi: f64, y: f64, det: f64 },

    #[error("oscillation unresolved: {needed} points exceed the cap {cap}")]
    OscillationUnresolved { needed: usize, cap: usize },

    #[error("norm underflowed to a non-positive value at t = {t}")]
    NonPositiveNorm { t: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
