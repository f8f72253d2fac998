use crate::analytic::Chart;
use crate::model::Basis;
use crate::Complex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("expected a spinor in the {expected:?} basis, got {found:?}")]
    BasisMismatch { expected: Basis, found: Basis },

    #[error("Gamma function pole at {0}")]
    Pole(Complex),

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("hypergeometric series did not converge within {terms} terms")]
    NoConvergence { terms: usize },

    #[error("hypergeometric evaluation is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error(
        "hypergeometric parameter magnitude {magnitude:.3} exceeds the supported limit {limit}"
    )]
    ParameterOverflow { magnitude: f64, limit: f64 },

    #[error("chart variable of the {chart:?} chart overflows at t = {t}")]
    ChartOverflow { chart: Chart, t: f64 },

    #[error("matching system is singular (|det| = {determinant:.3e}); resonant or degenerate parameters")]
    Singular { determinant: f64 },

    #[error("chart coefficients have not been matched")]
    Unmatched,

    #[error("integrator exceeded the step cap of {steps}")]
    StepLimit { steps: usize },

    #[error("integrator step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("integrator norm drift {drift:.3e} exceeds {limit:.1e}")]
    NormDrift { drift: f64, limit: f64 },
}
