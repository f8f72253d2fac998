//! Exact solution of the reduced Dirac system through a `tanh` step.
//!
//! Eliminating `theta` from
//!
//! ```text
//! i phi'   =  pi(t) phi + m theta
//! i theta' =  m phi - pi(t) theta
//! ```
//!
//! gives `phi'' + W(t) phi = 0` with `W = pi^2 + m^2 + i pi'`
//! ([`governing_frequency`]). In either chart variable
//! `zeta = -exp(±2(t - t0)/tau)` this is a Fuchsian equation with regular
//! singular points at `zeta = 0, 1, inf` and exponents
//!
//! | point    | exponents                                  |
//! |----------|--------------------------------------------|
//! | `0`      | `±i tau E_near / 2`                        |
//! | `1`      | `i tau D / 2`, `1 - i tau D / 2`           |
//! | `inf`    | `±i tau E_far / 2`                         |
//!
//! where `D = pi1 - pi2 = q (A2 - A1)`, `E_near` is the energy on the side
//! `zeta -> 0` approaches and `E_far` the other one. Writing
//! `phi = zeta^{±mu} (1 - zeta)^nu f` with `mu = i tau E_near / 2`,
//! `nu = i tau D / 2` leaves the Gauss equation for `f` with
//!
//! ```text
//! a = ±mu + nu + i tau E_far / 2,  b = ±mu + nu - i tau E_far / 2,  c = 1 ± 2 mu.
//! ```
//!
//! Both branches use the same exponent at `zeta = 1`, so `rho = nu`.
//!
//! Powers of `zeta` follow the principal branch with `zeta` on the negative
//! real axis approached from above: `zeta^mu = e^{i pi mu} (-zeta)^mu`. For
//! purely imaginary `mu` the factor `e^{i pi mu}` is the real
//! `e^{-pi tau E / 2}` that appears in the amplitude prefactors. Internally
//! every basis function is normalized with `(-zeta)^mu`, which is a pure phase,
//! and the chart coefficients are stored in that scaled form.

use std::f64::consts::PI;

use crate::model::{
    dirac_upper_of_eigenvector, weyl_eigen_norm_sqr, weyl_eigen_ratio, AsymptoticModes, Frequency,
    Kinematics, StepParameters, TwoSpinor,
};
use crate::specfun::{hyp2f1_derivative_with, hyp2f1_with, HypArgs, SeriesConfig};
use crate::{Complex, Error, Result};

/// Largest hypergeometric parameter magnitude accepted by [`build_solution`].
pub const MAX_PARAMETER_NORM: f64 = 150.0;

/// Chart evaluations whose condition estimate exceeds this are rejected; the
/// expected relative error would pass ~1e-9.
pub const MAX_CONDITION: f64 = 1e7;

/// `|det| / (|v1| |v2|)` below this marks the matching system singular.
const SINGULAR_RATIO: f64 = 1e-13;

const I: Complex = Complex::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    /// `zeta = -exp(+2(t - t0)/tau)`, tends to `0-` as `t -> -inf`.
    Earlier,
    /// `zeta = -exp(-2(t - t0)/tau)`, tends to `0-` as `t -> +inf`.
    Later,
}

impl Chart {
    /// The chart in which `|zeta| <= 1` at time `t`.
    pub fn natural(t: f64, params: &StepParameters) -> Chart {
        if t <= params.t0() {
            Chart::Earlier
        } else {
            Chart::Later
        }
    }

    /// `+1` for the earlier chart, `-1` for the later one: `d zeta/dt = sign * 2 zeta / tau`.
    fn sign(self) -> f64 {
        match self {
            Chart::Earlier => 1.0,
            Chart::Later => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartVariable {
    pub chart: Chart,
    pub zeta: Complex,
    /// `ln(-zeta)`, kept separately because `zeta` itself overflows first.
    pub log_neg_zeta: f64,
}

impl ChartVariable {
    pub fn at(chart: Chart, t: f64, params: &StepParameters) -> Result<Self> {
        let log_neg_zeta = 2.0 * chart.sign() * params.scaled_time(t);
        let zeta = -log_neg_zeta.exp();
        if !zeta.is_finite() || !log_neg_zeta.is_finite() {
            return Err(Error::ChartOverflow { chart, t });
        }
        Ok(Self {
            chart,
            zeta: Complex::new(zeta, 0.0),
            log_neg_zeta,
        })
    }

    /// `ln(1 - zeta) = ln(1 + e^L)` without overflow.
    fn log_one_minus_zeta(&self) -> f64 {
        let l = self.log_neg_zeta;
        if l > 0.0 {
            l + (-l).exp().ln_1p()
        } else {
            l.exp().ln_1p()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamTriple {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
}

impl ParamTriple {
    fn max_norm(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm())
    }
}

/// Exponents and Gauss parameters of one chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartSolution {
    pub chart: Chart,
    /// Exponent at `zeta = 0`: `i tau E_near / 2`.
    pub mu: Complex,
    /// Exponent at `zeta = 1` of the `zeta^mu` branch.
    pub nu: Complex,
    /// Exponent at `zeta = 1` of the `zeta^{-mu}` branch.
    pub rho: Complex,
    /// Parameters of the `zeta^mu` branch.
    pub abc: ParamTriple,
    /// Parameters of the `zeta^{-mu}` branch.
    pub abc_prime: ParamTriple,
}

impl ChartSolution {
    fn new(chart: Chart, params: &StepParameters) -> Self {
        let modes = params.asymptotic_modes();
        let (e_near, e_far) = match chart {
            Chart::Earlier => (modes.e1, modes.e2),
            Chart::Later => (modes.e2, modes.e1),
        };
        let half_tau = 0.5 * params.tau();
        let mu = I * (half_tau * e_near);
        let nu = I * (half_tau * (modes.pi1 - modes.pi2));
        let far = I * (half_tau * e_far);
        let rho = nu;
        Self {
            chart,
            mu,
            nu,
            rho,
            abc: ParamTriple {
                a: mu + nu + far,
                b: mu + nu - far,
                c: 1.0 + 2.0 * mu,
            },
            abc_prime: ParamTriple {
                a: -mu + rho + far,
                b: -mu + rho - far,
                c: 1.0 - 2.0 * mu,
            },
        }
    }

    /// Branch `k` (0: `zeta^mu`, 1: `zeta^{-mu}`) as `(exponent at 0, exponent at 1, params)`.
    fn branch(&self, k: usize) -> (Complex, Complex, ParamTriple) {
        match k {
            0 => (self.mu, self.nu, self.abc),
            _ => (-self.mu, self.rho, self.abc_prime),
        }
    }

    /// `e^{i pi x}` for the branch exponent `x`: converts between the principal
    /// `zeta^x` and the scaled `(-zeta)^x`.
    fn branch_phase(&self, k: usize) -> Complex {
        let (x, _, _) = self.branch(k);
        (I * PI * x).exp()
    }

    /// Scaled basis function `(-zeta)^x (1 - zeta)^y 2F1(a,b;c;zeta)` of
    /// branch `k` and its time derivative.
    fn basis(
        &self,
        k: usize,
        t: f64,
        params: &StepParameters,
        cfg: &SeriesConfig,
    ) -> Result<(Complex, Complex)> {
        let var = ChartVariable::at(self.chart, t, params)?;
        let (x, y, abc) = self.branch(k);
        let args = HypArgs {
            a: abc.a,
            b: abc.b,
            c: abc.c,
            z: var.zeta,
        };
        let f = hyp2f1_with(args, cfg)?;
        let df = hyp2f1_derivative_with(args, cfg)?;
        let condition = f.condition.max(df.condition);
        if condition > MAX_CONDITION {
            return Err(Error::IllConditioned { condition });
        }
        let prefactor = (x * var.log_neg_zeta + y * var.log_one_minus_zeta()).exp();
        let zeta = var.zeta.re;
        // zeta d/dzeta of the product.
        let log_derivative = x - y * (zeta / (1.0 - zeta));
        let zeta_dphi = prefactor * (log_derivative * f.value + df.value * zeta);
        let dphi_dt = zeta_dphi * (self.chart.sign() * 2.0 / params.tau());
        Ok((prefactor * f.value, dphi_dt))
    }
}

/// Paper-convention chart coefficients multiplying the principal-branch
/// `zeta^{±mu}` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartCoefficients {
    pub c1e: Complex,
    pub c2e: Complex,
    pub c1l: Complex,
    pub c2l: Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypergeometricSolution {
    pub earlier: ChartSolution,
    pub later: ChartSolution,
    params: StepParameters,
    /// Coefficients of the scaled basis functions: `[earlier; later]` by branch.
    scaled: Option<[[Complex; 2]; 2]>,
}

impl HypergeometricSolution {
    pub fn params(&self) -> &StepParameters {
        &self.params
    }

    pub fn chart(&self, chart: Chart) -> &ChartSolution {
        match chart {
            Chart::Earlier => &self.earlier,
            Chart::Later => &self.later,
        }
    }

    pub fn is_matched(&self) -> bool {
        self.scaled.is_some()
    }

    /// Paper-convention coefficients. These carry `e^{±pi tau E/2}` factors and
    /// overflow long before the scaled ones do.
    pub fn coefficients(&self) -> Option<ChartCoefficients> {
        let [[d1e, d2e], [d1l, d2l]] = self.scaled?;
        Some(ChartCoefficients {
            c1e: d1e / self.earlier.branch_phase(0),
            c2e: d2e / self.earlier.branch_phase(1),
            c1l: d1l / self.later.branch_phase(0),
            c2l: d2l / self.later.branch_phase(1),
        })
    }

    /// Installs unscaled chart coefficients (multiplying `zeta^x`), e.g. trial values.
    pub fn with_coefficients(mut self, c: ChartCoefficients) -> Self {
        self.scaled = Some([
            [
                c.c1e * self.earlier.branch_phase(0),
                c.c2e * self.earlier.branch_phase(1),
            ],
            [
                c.c1l * self.later.branch_phase(0),
                c.c2l * self.later.branch_phase(1),
            ],
        ]);
        self
    }

    /// Largest `|a|`, `|b|`, `|c|` across both charts and branches.
    pub fn max_parameter_norm(&self) -> f64 {
        [&self.earlier, &self.later]
            .iter()
            .map(|s| s.abc.max_norm().max(s.abc_prime.max_norm()))
            .fold(0.0, f64::max)
    }
}

/// `W(t) = pi(t)^2 + m^2 + i pi'(t)`, the coefficient in `phi'' + W phi = 0`.
pub fn governing_frequency(t: f64, params: &StepParameters) -> Complex {
    let pi = params.kinetic_momentum(t);
    let m = params.m();
    Complex::new(pi * pi + m * m, params.kinetic_momentum_rate(t))
}

/// Exponents and Gauss parameters for both charts; coefficients unset.
pub fn build_solution(params: &StepParameters) -> Result<HypergeometricSolution> {
    let sol = HypergeometricSolution {
        earlier: ChartSolution::new(Chart::Earlier, params),
        later: ChartSolution::new(Chart::Later, params),
        params: *params,
        scaled: None,
    };
    let magnitude = sol.max_parameter_norm();
    if magnitude > MAX_PARAMETER_NORM {
        return Err(Error::ParameterOverflow {
            magnitude,
            limit: MAX_PARAMETER_NORM,
        });
    }
    Ok(sol)
}

fn spinor_from(phi: Complex, dphi_dt: Complex, pi: f64, m: f64) -> TwoSpinor {
    // theta = (i phi' - pi phi) / m
    TwoSpinor::weyl(phi, (I * dphi_dt - phi * pi) / m)
}

/// Weyl-basis spinor of the given chart at time `t` with the stored
/// coefficients.
pub fn solve_chart(
    sol: &HypergeometricSolution,
    chart: Chart,
    t: f64,
    params: &StepParameters,
) -> Result<TwoSpinor> {
    let scaled = sol.scaled.ok_or(Error::Unmatched)?;
    let row = match chart {
        Chart::Earlier => scaled[0],
        Chart::Later => scaled[1],
    };
    let cs = sol.chart(chart);
    let cfg = SeriesConfig::default();
    let mut phi = Complex::new(0.0, 0.0);
    let mut dphi = Complex::new(0.0, 0.0);
    for (k, coeff) in row.iter().enumerate() {
        if *coeff == Complex::new(0.0, 0.0) {
            continue;
        }
        let (u, du) = cs.basis(k, t, params, &cfg)?;
        phi += coeff * u;
        dphi += coeff * du;
    }
    Ok(spinor_from(
        phi,
        dphi,
        params.kinetic_momentum(t),
        params.m(),
    ))
}

pub fn solve_earlier(
    sol: &HypergeometricSolution,
    t: f64,
    params: &StepParameters,
) -> Result<TwoSpinor> {
    solve_chart(sol, Chart::Earlier, t, params)
}

pub fn solve_later(
    sol: &HypergeometricSolution,
    t: f64,
    params: &StepParameters,
) -> Result<TwoSpinor> {
    solve_chart(sol, Chart::Later, t, params)
}

/// Spinor at `t` from the chart in which `|zeta| <= 1`.
pub fn solve(sol: &HypergeometricSolution, t: f64, params: &StepParameters) -> Result<TwoSpinor> {
    solve_chart(sol, Chart::natural(t, params), t, params)
}

/// `phi(t)` and `dphi/dt` of the given chart with the stored coefficients.
pub fn phi_and_rate(
    sol: &HypergeometricSolution,
    chart: Chart,
    t: f64,
    params: &StepParameters,
) -> Result<(Complex, Complex)> {
    let s = solve_chart(sol, chart, t, params)?;
    // Undo theta = (i phi' - pi phi)/m.
    let dphi = -I * (s.lower * params.m() + s.upper * params.kinetic_momentum(t));
    Ok((s.upper, dphi))
}

/// Relative residual `|phi'' + W phi| / |W phi|` at `t`, with `phi''` from a
/// fourth-order five-point stencil on the chart natural at `t`.
pub fn second_order_residual(
    sol: &HypergeometricSolution,
    t: f64,
    params: &StepParameters,
) -> Result<f64> {
    let modes = params.asymptotic_modes();
    let h = 0.02 * params.tau().min(1.0 / modes.e1.max(modes.e2));
    let chart = Chart::natural(t, params);
    let phi = |x: f64| phi_and_rate(sol, chart, x, params).map(|v| v.0);
    let d2 = (-phi(t + 2.0 * h)? + phi(t + h)? * 16.0 - phi(t)? * 30.0 + phi(t - h)? * 16.0
        - phi(t - 2.0 * h)?)
        / (12.0 * h * h);
    let w = governing_frequency(t, params) * phi(t)?;
    Ok((d2 + w).norm() / w.norm())
}

/// Sets the incident state `C1e = 0, C2e = 1` and solves for `C1l, C2l` so
/// that both Weyl components are continuous at `t0` (`zeta = -1` in both
/// charts).
pub fn match_at_t0(
    sol: &HypergeometricSolution,
    params: &StepParameters,
) -> Result<HypergeometricSolution> {
    let cfg = SeriesConfig::default();
    let t0 = params.t0();
    let pi0 = params.kinetic_momentum(t0);
    let m = params.m();

    let d2e = sol.earlier.branch_phase(1);
    let (u, du) = sol.earlier.basis(1, t0, params, &cfg)?;
    let target = spinor_from(u * d2e, du * d2e, pi0, m);

    let (u1, du1) = sol.later.basis(0, t0, params, &cfg)?;
    let (u2, du2) = sol.later.basis(1, t0, params, &cfg)?;
    let v1 = spinor_from(u1, du1, pi0, m);
    let v2 = spinor_from(u2, du2, pi0, m);

    let det = v1.upper * v2.lower - v2.upper * v1.lower;
    let scale = (v1.norm_sqr() * v2.norm_sqr()).sqrt();
    if !(det.norm() > SINGULAR_RATIO * scale) {
        return Err(Error::Singular {
            determinant: det.norm(),
        });
    }
    let d1l = (target.upper * v2.lower - v2.upper * target.lower) / det;
    let d2l = (v1.upper * target.lower - target.upper * v1.lower) / det;

    let mut out = sol.clone();
    out.scaled = Some([[Complex::new(0.0, 0.0), d2e], [d1l, d2l]]);
    Ok(out)
}

/// Scattering amplitudes and probabilities.
///
/// `g_i`, `g_f`, `g_b` are the upper Dirac-basis components of the incident,
/// later-forward and later-backward plane waves, each stripped of its
/// `e^{∓iE(t - t0)}` phase. `f = |g_f/g_i|`, `b = |g_b/g_i|`,
/// `forward = f^2/(f^2 + b^2)` and `backward = b^2/(f^2 + b^2)`.
/// The `_unitary` pair instead projects on normalized eigenvectors, so it is
/// the pair protected by norm conservation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub modes: AsymptoticModes,
    pub g_i: Complex,
    pub g_f: Complex,
    pub g_b: Complex,
    pub f: f64,
    pub b: f64,
    pub forward: f64,
    pub backward: f64,
    pub forward_unitary: f64,
    pub backward_unitary: f64,
    /// Backward amplitude with the prefactor `e^{+pi tau E1/2}` applied to
    /// `C2l`, as printed in the closed-form amplitude list. The consistent
    /// factor is `e^{+pi tau E2/2}`; the two differ whenever `E1 != E2`.
    pub g_b_literal: Complex,
}

impl ScatteringResult {
    fn from_amplitudes(
        modes: AsymptoticModes,
        m: f64,
        incident: Complex,
        forward: Complex,
        backward: Complex,
        g_b_literal_factor: f64,
    ) -> Self {
        let g_i = incident * dirac_upper_of_eigenvector(modes.pi1, m, Frequency::Positive);
        let g_f = forward * dirac_upper_of_eigenvector(modes.pi2, m, Frequency::Positive);
        let g_b = backward * dirac_upper_of_eigenvector(modes.pi2, m, Frequency::Negative);
        let f = (g_f / g_i).norm();
        let b = (g_b / g_i).norm();
        let total = f * f + b * b;
        let n_in = incident.norm_sqr() * weyl_eigen_norm_sqr(modes.pi1, m, Frequency::Positive);
        let n_f = forward.norm_sqr() * weyl_eigen_norm_sqr(modes.pi2, m, Frequency::Positive);
        let n_b = backward.norm_sqr() * weyl_eigen_norm_sqr(modes.pi2, m, Frequency::Negative);
        Self {
            modes,
            g_i,
            g_f,
            g_b,
            f,
            b,
            forward: f * f / total,
            backward: b * b / total,
            forward_unitary: n_f / n_in,
            backward_unitary: n_b / n_in,
            g_b_literal: g_b * g_b_literal_factor,
        }
    }

    /// True when the late kinetic momentum vanishes (`E2 = m`). The backward
    /// wave then has no upper Dirac component, so `b = 0` and `backward = 0`
    /// while `backward_unitary` stays positive.
    pub fn is_degenerate(&self) -> bool {
        self.modes.pi2 == 0.0
    }

    /// `|g_b_literal / g_i|`.
    pub fn b_literal(&self) -> f64 {
        (self.g_b_literal / self.g_i).norm()
    }
}

/// Reads the plane-wave amplitudes off the `zeta -> 0` limits of the matched
/// chart solutions, where each `2F1` tends to 1.
pub fn asymptotic_amplitudes(
    sol: &HypergeometricSolution,
    params: &StepParameters,
) -> Result<ScatteringResult> {
    let [[_, d2e], [d1l, d2l]] = sol.scaled.ok_or(Error::Unmatched)?;
    let modes = params.asymptotic_modes();
    let m = params.m();
    let half_tau = 0.5 * params.tau();
    // Literal prefactor e^{pi tau E1/2} on C2l, relative to the consistent
    // e^{pi tau E2/2} already folded into the scaled coefficient.
    let literal = (PI * half_tau * (modes.e1 - modes.e2)).exp();
    Ok(ScatteringResult::from_amplitudes(
        modes, m, d2e, d1l, d2l, literal,
    ))
}

/// Builds, matches and reads off amplitudes in one call.
pub fn scatter(params: &StepParameters) -> Result<ScatteringResult> {
    let sol = match_at_t0(&build_solution(params)?, params)?;
    asymptotic_amplitudes(&sol, params)
}

/// Heaviside limit: continuity of the Weyl spinor across an instantaneous
/// jump from `A1` to `A2`, `u1+ = alpha u2+ + beta u2-`.
pub fn sharp_step(kinematics: &Kinematics) -> Result<ScatteringResult> {
    let modes = kinematics.asymptotic_modes();
    let m = kinematics.m();
    let r1 = weyl_eigen_ratio(modes.pi1, m, Frequency::Positive);
    let r_plus = weyl_eigen_ratio(modes.pi2, m, Frequency::Positive);
    let r_minus = weyl_eigen_ratio(modes.pi2, m, Frequency::Negative);
    // r_plus - r_minus = 2 E2 / m
    let gap = 2.0 * modes.e2 / m;
    let alpha = (r1 - r_minus) / gap;
    let beta = (r_plus - r1) / gap;
    Ok(ScatteringResult::from_amplitudes(
        modes,
        m,
        Complex::new(1.0, 0.0),
        Complex::new(alpha, 0.0),
        Complex::new(beta, 0.0),
        1.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(tau: f64) -> StepParameters {
        let r3 = 3f64.sqrt();
        StepParameters::new(1.0, 1.0, r3, 0.0, 2.0 * r3, 0.0, tau).unwrap()
    }

    #[test]
    fn chart_variables_meet_at_minus_one() {
        let p = reference(0.3).with_t0(1.5).unwrap();
        for chart in [Chart::Earlier, Chart::Later] {
            let v = ChartVariable::at(chart, 1.5, &p).unwrap();
            assert_eq!(v.zeta, Complex::new(-1.0, 0.0));
        }
        let e = ChartVariable::at(Chart::Earlier, -100.0, &p).unwrap();
        assert!(e.zeta.re < 0.0 && e.zeta.re > -1e-100);
        let l = ChartVariable::at(Chart::Later, 100.0, &p).unwrap();
        assert!(l.zeta.re < 0.0 && l.zeta.re > -1e-100);
        assert!(matches!(
            ChartVariable::at(Chart::Earlier, 1e3, &p),
            Err(Error::ChartOverflow { .. })
        ));
    }

    #[test]
    fn exponents_reproduce_plane_wave_frequencies() {
        let p = StepParameters::new(1.3, -0.7, 0.4, 1.0, -2.0, 0.0, 0.8).unwrap();
        let sol = build_solution(&p).unwrap();
        let modes = p.asymptotic_modes();
        assert!((sol.earlier.mu - I * (0.4 * modes.e1)).norm() < 1e-15);
        assert!((sol.later.mu - I * (0.4 * modes.e2)).norm() < 1e-15);
        // (-zeta_e)^{-mu} = exp(-mu * 2(t - t0)/tau) = exp(-i E1 (t - t0)).
        let t = -3.0;
        let var = ChartVariable::at(Chart::Earlier, t, &p).unwrap();
        let wave = (-sol.earlier.mu * var.log_neg_zeta).exp();
        assert!((wave - (-I * modes.e1 * t).exp()).norm() < 1e-14);
        for triple in [
            sol.earlier.abc,
            sol.earlier.abc_prime,
            sol.later.abc,
            sol.later.abc_prime,
        ] {
            for v in [triple.a, triple.b, triple.c] {
                assert!(v.re.is_finite() && v.im.is_finite());
            }
            assert!(triple.c.im != 0.0);
        }
    }

    #[test]
    fn indicial_equations_hold() {
        // Exponents at zeta = 1 solve nu^2 - nu + k D (k D + i) = 0 with k = tau/2.
        let p = StepParameters::new(1.0, 1.0, 0.9, -0.5, 2.2, 0.0, 0.6).unwrap();
        let sol = build_solution(&p).unwrap();
        let modes = p.asymptotic_modes();
        let kd = 0.3 * (modes.pi1 - modes.pi2);
        for nu in [sol.earlier.nu, sol.later.rho, 1.0 - sol.earlier.nu] {
            let r = nu * nu - nu + kd * (kd + I);
            assert!(r.norm() < 1e-14);
        }
        // Exponents at infinity: a and b of the zeta^mu branch are mu + nu ± i k E_far.
        let a_minus_b = sol.earlier.abc.a - sol.earlier.abc.b;
        assert!((a_minus_b - I * (0.6 * modes.e2)).norm() < 1e-14);
    }

    #[test]
    fn parameter_overflow() {
        let p = StepParameters::new(1.0, 1.0, 5.0, 0.0, -40.0, 0.0, 10.0).unwrap();
        assert!(matches!(
            build_solution(&p),
            Err(Error::ParameterOverflow { .. })
        ));
    }

    #[test]
    fn unmatched_solution_is_rejected() {
        let p = reference(0.3);
        let sol = build_solution(&p).unwrap();
        assert!(matches!(
            solve_earlier(&sol, -1.0, &p),
            Err(Error::Unmatched)
        ));
        assert!(matches!(
            asymptotic_amplitudes(&sol, &p),
            Err(Error::Unmatched)
        ));
    }

    #[test]
    fn matching_is_continuous() {
        for tau in [1e-4, 0.05, 0.3, 1.0, 4.0] {
            let p = reference(tau).with_t0(0.7).unwrap();
            let sol = match_at_t0(&build_solution(&p).unwrap(), &p).unwrap();
            let e = solve_earlier(&sol, 0.7, &p).unwrap();
            let l = solve_later(&sol, 0.7, &p).unwrap();
            let mismatch = e.distance(&l).unwrap() / e.norm_sqr().sqrt();
            assert!(mismatch < 1e-10, "tau {tau}: {mismatch}");
            let c = sol.coefficients().unwrap();
            assert_eq!(c.c1e, Complex::new(0.0, 0.0));
            assert!((c.c2e - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn incident_limit_is_positive_frequency_eigenvector() {
        let p = StepParameters::new(1.0, 1.0, 0.8, 0.3, 2.5, 0.2, 0.4).unwrap();
        let sol = match_at_t0(&build_solution(&p).unwrap(), &p).unwrap();
        let modes = p.asymptotic_modes();
        let t = p.t0() - 20.0 * p.tau();
        let s = solve_earlier(&sol, t, &p).unwrap();
        let r = weyl_eigen_ratio(modes.pi1, 1.0, Frequency::Positive);
        assert!((s.lower / s.upper - r).norm() < 1e-8 * r.abs());
        // Scaled amplitude e^{pi tau E1/2} with phase e^{-i E1 (t - t0)}.
        let want = (PI * 0.2 * modes.e1).exp() * (-I * modes.e1 * (t - p.t0())).exp();
        assert!((s.upper - want).norm() < 1e-8 * want.norm());
    }

    #[test]
    fn flat_potential_is_a_free_wave() {
        let p = StepParameters::new(1.0, 1.0, 1.0, 2.0, 2.0, 0.0, 0.5).unwrap();
        let sol = match_at_t0(&build_solution(&p).unwrap(), &p).unwrap();
        let modes = p.asymptotic_modes();
        let norm = (PI * 0.25 * modes.e1).exp();
        let r = weyl_eigen_ratio(modes.pi1, 1.0, Frequency::Positive);
        for t in [-4.0, -0.3, 0.0, 0.9, 6.0] {
            let s = solve(&sol, t, &p).unwrap();
            let phase = (-I * modes.e1 * t).exp() * norm;
            assert!((s.upper - phase).norm() < 1e-10 * norm);
            assert!((s.lower - phase * r).norm() < 1e-10 * norm);
        }
        let res = asymptotic_amplitudes(&sol, &p).unwrap();
        assert!((res.forward - 1.0).abs() < 1e-12 && res.backward < 1e-12);
        assert!((res.forward_unitary - 1.0).abs() < 1e-12 && res.backward_unitary < 1e-12);
        assert!((res.f - 1.0).abs() < 1e-12 && res.b < 1e-12);
    }

    #[test]
    fn sharp_step_reference_values() {
        let r3 = 3f64.sqrt();
        let res = sharp_step(&Kinematics::new(1.0, 1.0, r3, 0.0, 2.0 * r3).unwrap()).unwrap();
        assert!((res.g_f / res.g_i - 0.5).norm() < 1e-14);
        assert!((res.g_b / res.g_i - 0.5).norm() < 1e-14);
        assert!((res.forward - 0.5).abs() < 1e-14);
        assert!((res.backward - 0.5).abs() < 1e-14);
        assert!((res.forward_unitary - 0.25).abs() < 1e-14);
        assert!((res.backward_unitary - 0.75).abs() < 1e-14);

        let flat = sharp_step(&Kinematics::new(1.0, 1.0, 0.4, 1.5, 1.5).unwrap()).unwrap();
        assert_eq!(flat.forward, 1.0);
        assert_eq!(flat.backward, 0.0);
    }

    #[test]
    fn vanishing_late_momentum() {
        // pi2 = 0: the backward wave has no upper Dirac component, so b = 0
        // while the unitary pair still sees backward scattering.
        let k = Kinematics::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let sharp = sharp_step(&k).unwrap();
        assert!(sharp.is_degenerate());
        assert_eq!(sharp.b, 0.0);
        assert_eq!(sharp.forward, 1.0);
        let r2 = 2f64.sqrt();
        assert!((sharp.forward_unitary - 1.0 / (4.0 - 2.0 * r2)).abs() < 1e-14);
        assert!((sharp.backward_unitary - (3.0 - 2.0 * r2) / (4.0 - 2.0 * r2)).abs() < 1e-14);
        let soft = scatter(&k.with_transition(0.0, 0.5).unwrap()).unwrap();
        assert_eq!(soft.b, 0.0);
        assert!(soft.backward_unitary > 0.0);
        assert!((soft.forward_unitary + soft.backward_unitary - 1.0).abs() < 1e-10);
    }

    #[test]
    fn probabilities_normalize() {
        for tau in [1e-4, 0.1, 0.5, 2.0] {
            for (p, a2) in [(0.5, 4.0), (-2.0, 1.0), (3.0, 5.0)] {
                let params = StepParameters::new(1.0, 1.0, p, 0.0, a2, 0.0, tau).unwrap();
                let r = scatter(&params).unwrap();
                assert!((r.forward + r.backward - 1.0).abs() < 1e-15);
                assert!((r.forward_unitary + r.backward_unitary - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn literal_backward_prefactor_matches_only_for_equal_energies() {
        let r = scatter(&reference(0.5)).unwrap();
        assert!((r.b_literal() - r.b).abs() < 1e-14);
        let p = StepParameters::new(1.0, 1.0, 1.0, 0.0, 3.5, 0.0, 0.5).unwrap();
        let r = scatter(&p).unwrap();
        let ratio = r.b_literal() / r.b;
        let want = (PI * 0.25 * (r.modes.e1 - r.modes.e2)).exp();
        assert!((ratio - want).abs() < 1e-12 * want);
        assert!((ratio - 1.0).abs() > 0.1);
    }

    #[test]
    fn governing_frequency_limits() {
        let flat = StepParameters::new(1.0, 1.0, 0.7, 1.2, 1.2, 0.0, 0.3).unwrap();
        let e1 = flat.asymptotic_modes().e1;
        let pi1 = flat.asymptotic_modes().pi1;
        let omega = governing_frequency(0.4, &flat);
        assert!((omega - Complex::new(pi1 * pi1 + 1.0, 0.0)).norm() < 1e-14 * e1 * e1);
        let p = reference(0.3);
        let modes = p.asymptotic_modes();
        let early = governing_frequency(-30.0 * 0.3, &p);
        let late = governing_frequency(30.0 * 0.3, &p);
        assert!((early - (modes.pi1 * modes.pi1 + 1.0)).norm() < 1e-20);
        assert!((late - (modes.pi2 * modes.pi2 + 1.0)).norm() < 1e-20);
    }

    #[test]
    fn matched_phi_satisfies_second_order_equation() {
        let p = reference(0.3);
        let sol = match_at_t0(&build_solution(&p).unwrap(), &p).unwrap();
        for t in [-0.6, 0.0, 0.6] {
            let r = second_order_residual(&sol, t, &p).unwrap();
            assert!(r < 1e-7, "t = {t}: residual {r}");
        }
    }
}
