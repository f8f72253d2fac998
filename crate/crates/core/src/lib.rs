//! Relativistic electron scattering at a smooth temporal potential step.
//!
//! A spatially uniform vector potential `A(t)` switches from `A1` to `A2`
//! along a `tanh` profile of width `tau`. The Dirac equation for a fixed
//! z-momentum `p` reduces to a two-component system whose exact solutions are
//! built from Gauss hypergeometric functions in two time charts ("earlier"
//! and "later" than the transition time). Matching the charts at `t0` gives
//! the amplitudes of the later forward wave (`e^{-iE2 t}`) and the later
//! backward wave (`e^{+iE2 t}`).
//!
//! Modules:
//!
//! * [`model`]: parameters, the potential profile, asymptotic kinematics,
//!   two-spinors and the Weyl/Dirac basis change.
//! * [`specfun`]: complex log-Gamma and `2F1` on the real arguments the
//!   solution visits.
//! * [`analytic`]: the hypergeometric solution, chart matching, amplitudes,
//!   probabilities, and the Heaviside limit.
//! * [`oracle`]: an independent adaptive Runge-Kutta integration of the same
//!   two-component system, used to cross-check [`analytic`].
//!
//! All quantities are in natural units (`hbar = c = 1`).
//!
//! ```
//! use tempstep_core::{compare, scatter, sharp_step, IntegrationConfig, StepParameters};
//!
//! let r3 = 3f64.sqrt();
//! let params = StepParameters::new(1.0, 1.0, r3, 0.0, 2.0 * r3, 0.0, 0.5)?;
//! let soft = scatter(&params)?;
//! let sharp = sharp_step(params.kinematics())?;
//! assert!(soft.backward_unitary < sharp.backward_unitary);
//!
//! let report = compare(&params, &IntegrationConfig::default(), 1e-6)?;
//! assert!(report.passed);
//! # Ok::<(), tempstep_core::Error>(())
//! ```

// `!(x > y)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
mod error;
pub mod model;
pub mod oracle;
pub mod specfun;

pub use error::{Error, Result};

pub use analytic::{
    build_solution, match_at_t0, scatter, second_order_residual, sharp_step, Chart, ChartVariable,
    HypergeometricSolution, ScatteringResult,
};
pub use model::{AsymptoticModes, Basis, Kinematics, StepParameters, TwoSpinor};
pub use num_complex::Complex64 as Complex;
pub use oracle::{
    compare, integrate, ComparisonReport, Deviation, IntegrationConfig, OracleOutcome,
};
