//! Brute-force check of the analytic amplitudes: integrate the reduced Weyl
//! system through the step with an embedded Dormand-Prince 5(4) pair and
//! project the final state on the exact late-time eigenvectors.
//!
//! The flow `psi' = -i H(t) psi` has a Hermitian generator, so `|psi|^2` is
//! conserved exactly; the integrator tracks its drift as a health check.

use crate::analytic::{scatter, ScatteringResult};
use crate::model::{
    dirac_upper_of_eigenvector, weyl_eigen_norm_sqr, weyl_eigen_ratio, Frequency, StepParameters,
    TwoSpinor,
};
use crate::{Complex, Error, Result};

/// Largest accepted relative change of `|psi|^2` over a trajectory.
pub const NORM_DRIFT_LIMIT: f64 = 1e-9;

/// Incident oscillations kept in the window when `tau` is tiny.
const MIN_INCIDENT_PHASE: f64 = 10.0;

const I: Complex = Complex::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    /// Integrate over `t0 ± span_factor * tau`.
    pub span_factor: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            span_factor: 20.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.span_factor >= 12.0) || !self.span_factor.is_finite() {
            return Err(Error::InvalidParameter {
                name: "span_factor",
                reason: format!("must be at least 12, got {}", self.span_factor),
            });
        }
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-3) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must lie in (0, 1e-3], got {tol}"),
                });
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "max_steps",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome {
    /// Weyl-basis state at `t_end`.
    pub final_spinor: TwoSpinor,
    pub t_start: f64,
    pub t_end: f64,
    /// Upper Dirac component of the unit-amplitude incident wave.
    pub g_i: Complex,
    pub g_f_num: Complex,
    pub g_b_num: Complex,
    pub f_num: f64,
    pub b_num: f64,
    pub forward_unitary: f64,
    pub backward_unitary: f64,
    /// Largest `| |psi(t)|^2 - |psi(t_start)|^2 | / |psi(t_start)|^2` seen.
    pub norm_drift: f64,
    pub steps: usize,
    pub rejected: usize,
}

impl OracleOutcome {
    pub fn forward(&self) -> f64 {
        let f2 = self.f_num * self.f_num;
        f2 / (f2 + self.b_num * self.b_num)
    }

    pub fn backward(&self) -> f64 {
        let b2 = self.b_num * self.b_num;
        b2 / (self.f_num * self.f_num + b2)
    }
}

type State = [Complex; 2];

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for &(c, k) in terms {
        if c != 0.0 {
            out[0] += k[0] * (c * h);
            out[1] += k[1] * (c * h);
        }
    }
    out
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Fifth- minus fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants (Hairer & Wanner's DOPRI5 defaults).
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - 0.75 * BETA;
const MIN_SHRINK: f64 = 0.2;
const MAX_GROWTH: f64 = 10.0;

struct Trajectory {
    state: State,
    norm_drift: f64,
    steps: usize,
    rejected: usize,
}

/// Integrates `i psi' = [[pi(t), m], [m, -pi(t)]] psi` from `t_start` to
/// `t_end`.
fn evolve<P>(
    kinetic: P,
    m: f64,
    mut state: State,
    t_start: f64,
    t_end: f64,
    h_initial: f64,
    cfg: &IntegrationConfig,
) -> Result<Trajectory>
where
    P: Fn(f64) -> f64,
{
    let rhs = |t: f64, y: &State| -> State {
        let pi = kinetic(t);
        [-I * (y[0] * pi + y[1] * m), -I * (y[0] * m - y[1] * pi)]
    };
    let span = t_end - t_start;
    let norm0 = state[0].norm_sqr() + state[1].norm_sqr();
    let mut drift: f64 = 0.0;
    let mut t = t_start;
    let mut h = h_initial.min(t_end - t_start);
    let mut k1 = rhs(t, &state);
    let mut err_old: f64 = 1e-4;
    let mut steps = 0;
    let mut rejected = 0;
    let mut last_rejected = false;

    while t < t_end {
        if steps + rejected >= cfg.max_steps {
            return Err(Error::StepLimit {
                steps: cfg.max_steps,
            });
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let y = &state;
        let k2 = rhs(t + C2 * h, &axpy(y, &[(A21, &k1)], h));
        let k3 = rhs(t + C3 * h, &axpy(y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = rhs(
            t + C4 * h,
            &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
        );
        let k5 = rhs(
            t + C5 * h,
            &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = rhs(
            t + h,
            &axpy(
                y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ),
        );
        let y_new = axpy(
            y,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            h,
        );
        let k7 = rhs(t + h, &y_new);
        let err_vec = axpy(
            &[Complex::new(0.0, 0.0); 2],
            &[
                (E1, &k1),
                (E3, &k3),
                (E4, &k4),
                (E5, &k5),
                (E6, &k6),
                (E7, &k7),
            ],
            h,
        );
        // Error per unit step: the tolerances bound the error accumulated over
        // the whole window rather than the error of a single step.
        let share = h / span;
        let mut sum = 0.0;
        for j in 0..2 {
            let scale = share * (cfg.abs_tol + cfg.rel_tol * y[j].norm().max(y_new[j].norm()));
            sum += (err_vec[j].norm() / scale).powi(2);
        }
        let err = (sum / 2.0).sqrt();

        let grow = err.powf(EXPO);
        if err <= 1.0 {
            let fac =
                (grow / err_old.powf(BETA) / SAFETY).clamp(1.0 / MAX_GROWTH, 1.0 / MIN_SHRINK);
            let mut h_next = h / fac;
            if last_rejected {
                h_next = h_next.min(h);
            }
            err_old = err.max(1e-4);
            t = if last { t_end } else { t + h };
            state = y_new;
            k1 = k7;
            steps += 1;
            last_rejected = false;
            let norm = state[0].norm_sqr() + state[1].norm_sqr();
            drift = drift.max((norm - norm0).abs() / norm0);
            h = h_next;
        } else {
            h /= (grow / SAFETY).min(1.0 / MIN_SHRINK);
            rejected += 1;
            last_rejected = true;
        }
    }
    Ok(Trajectory {
        state,
        norm_drift: drift,
        steps,
        rejected,
    })
}

/// Integrates the step starting from the exact incident plane wave and reads
/// the later forward and backward amplitudes off the final state.
pub fn integrate(params: &StepParameters, cfg: &IntegrationConfig) -> Result<OracleOutcome> {
    integrate_profile(params, cfg, |t| params.kinetic_momentum(t))
}

/// As [`integrate`], with an arbitrary kinetic-momentum profile that must
/// settle to `p - q A1` before and `p - q A2` after the window.
pub(crate) fn integrate_profile<P>(
    params: &StepParameters,
    cfg: &IntegrationConfig,
    kinetic: P,
) -> Result<OracleOutcome>
where
    P: Fn(f64) -> f64,
{
    cfg.validate()?;
    let modes = params.asymptotic_modes();
    let m = params.m();
    let t0 = params.t0();
    let half_span = (cfg.span_factor * params.tau()).max(MIN_INCIDENT_PHASE / modes.e1);
    let t_start = t0 - half_span;
    let t_end = t0 + half_span;

    let r1 = weyl_eigen_ratio(modes.pi1, m, Frequency::Positive);
    let phase = (-I * modes.e1 * (t_start - t0)).exp();
    let initial = [phase, phase * r1];

    let fastest = modes.e1.max(modes.e2).max(1.0 / params.tau());
    let traj = evolve(kinetic, m, initial, t_start, t_end, 1e-3 / fastest, cfg)?;
    if traj.norm_drift > NORM_DRIFT_LIMIT {
        return Err(Error::NormDrift {
            drift: traj.norm_drift,
            limit: NORM_DRIFT_LIMIT,
        });
    }

    // psi = c_f (1, r+) + c_b (1, r-)
    let [phi, theta] = traj.state;
    let r_plus = weyl_eigen_ratio(modes.pi2, m, Frequency::Positive);
    let r_minus = weyl_eigen_ratio(modes.pi2, m, Frequency::Negative);
    let gap = r_plus - r_minus;
    let elapsed = t_end - t0;
    let c_f = (theta - phi * r_minus) / gap * (I * modes.e2 * elapsed).exp();
    let c_b = (phi * r_plus - theta) / gap * (-I * modes.e2 * elapsed).exp();

    let g_i = Complex::new(
        dirac_upper_of_eigenvector(modes.pi1, m, Frequency::Positive),
        0.0,
    );
    let g_f_num = c_f * dirac_upper_of_eigenvector(modes.pi2, m, Frequency::Positive);
    let g_b_num = c_b * dirac_upper_of_eigenvector(modes.pi2, m, Frequency::Negative);
    let n_in = weyl_eigen_norm_sqr(modes.pi1, m, Frequency::Positive);
    Ok(OracleOutcome {
        final_spinor: TwoSpinor::weyl(phi, theta),
        t_start,
        t_end,
        g_i,
        g_f_num,
        g_b_num,
        f_num: (g_f_num / g_i).norm(),
        b_num: (g_b_num / g_i).norm(),
        forward_unitary: c_f.norm_sqr() * weyl_eigen_norm_sqr(modes.pi2, m, Frequency::Positive)
            / n_in,
        backward_unitary: c_b.norm_sqr() * weyl_eigen_norm_sqr(modes.pi2, m, Frequency::Negative)
            / n_in,
        norm_drift: traj.norm_drift,
        steps: traj.steps,
        rejected: traj.rejected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub quantity: &'static str,
    pub analytic: f64,
    pub oracle: f64,
    pub absolute: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub analytic: ScatteringResult,
    pub oracle: OracleOutcome,
    pub deviations: Vec<Deviation>,
    pub tolerance: f64,
    /// Every deviation satisfies `absolute <= tolerance * max(1, |analytic|)`.
    pub passed: bool,
}

impl ComparisonReport {
    pub fn deviation(&self, quantity: &str) -> Option<&Deviation> {
        self.deviations.iter().find(|d| d.quantity == quantity)
    }
}

/// Runs the analytic solution and the integrator on the same parameters.
pub fn compare(
    params: &StepParameters,
    cfg: &IntegrationConfig,
    tolerance: f64,
) -> Result<ComparisonReport> {
    let analytic = scatter(params)?;
    let oracle = integrate(params, cfg)?;
    let pairs = [
        ("f", analytic.f, oracle.f_num),
        ("b", analytic.b, oracle.b_num),
        ("F", analytic.forward, oracle.forward()),
        ("B", analytic.backward, oracle.backward()),
        ("F_u", analytic.forward_unitary, oracle.forward_unitary),
        ("B_u", analytic.backward_unitary, oracle.backward_unitary),
    ];
    let deviations: Vec<Deviation> = pairs
        .iter()
        .map(|&(quantity, a, o)| {
            let absolute = (a - o).abs();
            Deviation {
                quantity,
                analytic: a,
                oracle: o,
                absolute,
                relative: if a == 0.0 {
                    absolute
                } else {
                    absolute / a.abs()
                },
            }
        })
        .collect();
    let passed = deviations
        .iter()
        .all(|d| d.absolute <= tolerance * d.analytic.abs().max(1.0));
    Ok(ComparisonReport {
        analytic,
        oracle,
        deviations,
        tolerance,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(tau: f64) -> StepParameters {
        let r3 = 3f64.sqrt();
        StepParameters::new(1.0, 1.0, r3, 0.0, 2.0 * r3, 0.0, tau).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut cfg = IntegrationConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.span_factor = 11.0;
        assert!(cfg.validate().is_err());
        cfg = IntegrationConfig {
            rel_tol: 1e-2,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg = IntegrationConfig {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn free_evolution() {
        let p = StepParameters::new(1.0, 1.0, 0.6, 1.0, 1.0, 0.0, 0.5).unwrap();
        let out = integrate(&p, &IntegrationConfig::default()).unwrap();
        assert!(out.b_num < 1e-10);
        assert!((out.f_num - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sharp_limit() {
        let out = integrate(&reference(1e-4), &IntegrationConfig::default()).unwrap();
        assert!((out.f_num / out.b_num - 1.0).abs() < 1e-3);
        assert!(out.norm_drift < NORM_DRIFT_LIMIT);
    }

    #[test]
    fn step_cap_is_reported() {
        let cfg = IntegrationConfig {
            max_steps: 50,
            ..Default::default()
        };
        assert!(matches!(
            integrate(&reference(0.3), &cfg),
            Err(Error::StepLimit { steps: 50 })
        ));
    }

    #[test]
    fn norm_is_conserved() {
        let out = integrate(&reference(0.3), &IntegrationConfig::default()).unwrap();
        assert!(out.norm_drift < 1e-9, "{}", out.norm_drift);
        assert!((out.forward_unitary + out.backward_unitary - 1.0).abs() < 1e-9);
    }

    #[test]
    fn profile_hook_linear_ramp() {
        // A short linear ramp is close to the sharp jump as well.
        let p = reference(1e-4);
        let (pi1, pi2) = (p.asymptotic_modes().pi1, p.asymptotic_modes().pi2);
        let width = 1e-5;
        let out = integrate_profile(&p, &IntegrationConfig::default(), |t| {
            let x = (t / width + 0.5).clamp(0.0, 1.0);
            pi1 + (pi2 - pi1) * x
        })
        .unwrap();
        assert!((out.forward_unitary - 0.25).abs() < 1e-4);
        assert!((out.backward_unitary - 0.75).abs() < 1e-4);
    }

    #[test]
    fn comparison_reference_point() {
        let report = compare(&reference(0.3), &IntegrationConfig::default(), 1e-6).unwrap();
        assert!(report.passed, "{:?}", report.deviations);
        assert!(report.deviation("f").unwrap().absolute < 1e-6);
        assert!(report.deviation("b").unwrap().absolute < 1e-6);
    }

    #[test]
    fn comparison_flat() {
        let p = StepParameters::new(1.0, 1.0, -0.9, 2.0, 2.0, 0.0, 0.4).unwrap();
        let report = compare(&p, &IntegrationConfig::default(), 1e-10).unwrap();
        for d in &report.deviations {
            assert!(d.absolute < 1e-10, "{d:?}");
        }
    }

    #[test]
    fn comparison_adiabatic() {
        let report = compare(&reference(10.0), &IntegrationConfig::default(), 1e-6).unwrap();
        assert!(report.analytic.backward_unitary < 1e-6);
        assert!(report.oracle.backward_unitary < 1e-6);
    }
}
