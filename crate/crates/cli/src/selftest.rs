//! Built-in validation: the same properties the acceptance suite checks,
//! runnable from an installed binary.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use tempstep_core::specfun::{gamma, hyp2f1, log_gamma, HypArgs};
use tempstep_core::{
    build_solution, compare, integrate, match_at_t0, scatter, second_order_residual, sharp_step,
    Complex, IntegrationConfig, Kinematics, StepParameters,
};

use crate::args::{FigureAxis, PhysicsArgs, SweepVar};
use crate::figure::{compute_panel, FigureSpec, SHARP_TAU, SOFT_TAU};
use crate::sweep::{self, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// The grid shared by the oracle comparison and the sharp-limit check.
pub fn grid_momenta() -> [f64; 5] {
    [0.5, 1.0, 3f64.sqrt(), 2.5, 4.0]
}

pub fn grid_potentials() -> [f64; 5] {
    [0.5, 1.0, 2.0 * 3f64.sqrt(), 4.0, 5.0]
}

pub const GRID_TAUS: [f64; 5] = [0.05, 0.1, 0.3, 1.0, 3.0];

fn params(p: f64, a2: f64, tau: f64) -> StepParameters {
    StepParameters::new(1.0, 1.0, p, 0.0, a2, 0.0, tau).expect("valid grid point")
}

fn anchor(tau: f64) -> StepParameters {
    let r3 = 3f64.sqrt();
    params(r3, 2.0 * r3, tau)
}

struct Ctx {
    /// Multiplies every tolerance; 1 in normal runs.
    slack: f64,
}

type Outcome = Result<String, String>;

fn timed(name: &'static str, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let outcome = f();
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => Check {
            name,
            passed: true,
            detail,
            seconds,
        },
        Err(detail) => Check {
            name,
            passed: false,
            detail,
            seconds,
        },
    }
}

fn normalization(ctx: &Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let points: Vec<(f64, f64, f64)> = (0..500)
        .map(|_| {
            (
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                10f64.powf(rng.random_range(-4.0..1.0)),
            )
        })
        .collect();
    let worst = points
        .par_iter()
        .map(|&(p, a2, tau)| {
            let r = scatter(&params(p, a2, tau))
                .map_err(|e| format!("p={p} A2={a2} tau={tau}: {e}"))?;
            Ok((
                (r.forward + r.backward - 1.0).abs(),
                (r.forward_unitary + r.backward_unitary - 1.0).abs(),
            ))
        })
        .collect::<Result<Vec<_>, String>>()?
        .into_iter()
        .fold((0.0f64, 0.0f64), |acc, x| (acc.0.max(x.0), acc.1.max(x.1)));
    let detail = format!(
        "500 points, max |F+B-1| = {:.2e}, max |F_u+B_u-1| = {:.2e}",
        worst.0, worst.1
    );
    if worst.0 < 1e-12 * ctx.slack && worst.1 < 1e-9 * ctx.slack {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Returns the largest scaled deviation and the largest norm drift seen.
pub fn oracle_grid(cfg: &IntegrationConfig) -> Result<(f64, f64), String> {
    let mut points = Vec::new();
    for p in grid_momenta() {
        for a2 in grid_potentials() {
            for tau in GRID_TAUS {
                points.push((p, a2, tau));
            }
        }
    }
    let results = points
        .par_iter()
        .map(|&(p, a2, tau)| {
            let report = compare(&params(p, a2, tau), cfg, f64::INFINITY)
                .map_err(|e| format!("p={p} A2={a2} tau={tau}: {e}"))?;
            let a = &report.analytic;
            let scale = 1f64.max(a.f).max(a.b);
            let dev = (a.f - report.oracle.f_num)
                .abs()
                .max((a.b - report.oracle.b_num).abs())
                / scale;
            Ok((dev, report.oracle.norm_drift))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(results
        .into_iter()
        .fold((0.0f64, 0.0f64), |acc, x| (acc.0.max(x.0), acc.1.max(x.1))))
}

fn analytic_vs_oracle(ctx: &Ctx) -> Outcome {
    let (dev, drift) = oracle_grid(&IntegrationConfig::default())?;
    let detail =
        format!("125 points, max deviation {dev:.2e} (scaled), max norm drift {drift:.2e}");
    if dev < 1e-6 * ctx.slack {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sharp_limit(ctx: &Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    for p in grid_momenta() {
        for a2 in grid_potentials() {
            let k = Kinematics::new(1.0, 1.0, p, 0.0, a2).map_err(|e| e.to_string())?;
            let sharp = sharp_step(&k).map_err(|e| e.to_string())?;
            let soft = scatter(&params(p, a2, SHARP_TAU)).map_err(|e| e.to_string())?;
            worst = worst.max((soft.forward - sharp.forward).abs());
        }
    }
    let a = scatter(&anchor(SHARP_TAU)).map_err(|e| e.to_string())?;
    let anchor_dev = [
        (a.forward - 0.5).abs(),
        (a.backward - 0.5).abs(),
        (a.forward_unitary - 0.25).abs(),
        (a.backward_unitary - 0.75).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let detail = format!("max |F - F_sharp| = {worst:.2e}, anchor deviation {anchor_dev:.2e}");
    if worst < 1e-3 * ctx.slack && anchor_dev < 1e-3 * ctx.slack {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn figure_claims(ctx: &Ctx) -> Outcome {
    let spec = FigureSpec::new(FigureAxis::A2, None, None, 241).map_err(|e| e.to_string())?;
    let sharp = compute_panel(&spec, SHARP_TAU);
    let soft = compute_panel(&spec, SOFT_TAU);
    let failures = sharp.failures() + soft.failures();
    let dev = sharp.max_sharp_deviation();
    let peak = soft.max_backward();
    let detail = format!(
        "tau = 1e-4: max |B - B_sharp| = {dev:.2e}; tau = 0.5: max B = {peak:.3}; {failures} failed rows"
    );
    if failures == 0 && dev < 0.01 * ctx.slack && peak > 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn adiabatic(ctx: &Ctx) -> Outcome {
    let modes = anchor(1.0).asymptotic_modes();
    let tau_min = 5.0 / (modes.e1 + modes.e2);
    let n = 80;
    let mut last = f64::INFINITY;
    for i in 0..=n {
        let tau = tau_min + (10.0 - tau_min) * i as f64 / n as f64;
        let b = scatter(&anchor(tau))
            .map_err(|e| e.to_string())?
            .backward_unitary;
        if !(b < last) {
            return Err(format!(
                "B_u not decreasing at tau = {tau}: {b:.3e} >= {last:.3e}"
            ));
        }
        last = b;
    }
    let detail = format!("B_u decreasing on [{tau_min:.3}, 10], B_u(10) = {last:.3e}");
    if last < 1e-6 * ctx.slack {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn special_functions(ctx: &Ctx) -> Outcome {
    let c = |re: f64, im: f64| Complex::new(re, im);
    let tol = 1e-10 * ctx.slack;
    let mut worst: f64 = 0.0;
    let mut track = |what: &str, got: Complex, want: Complex| -> Result<(), String> {
        let err = (got - want).norm() / want.norm().max(1.0);
        worst = worst.max(err);
        if err < tol {
            Ok(())
        } else {
            Err(format!("{what}: got {got}, want {want} (error {err:.2e})"))
        }
    };
    let e = |r: tempstep_core::Result<Complex>| r.map_err(|e| e.to_string());
    track("Gamma(1)", e(gamma(c(1.0, 0.0)))?, c(1.0, 0.0))?;
    track("Gamma(1/2)", e(gamma(c(0.5, 0.0)))?, c(PI.sqrt(), 0.0))?;
    track("Gamma(4)", e(gamma(c(4.0, 0.0)))?, c(6.0, 0.0))?;
    track(
        "log Gamma(4)",
        e(log_gamma(c(4.0, 0.0)))?,
        c(6f64.ln(), 0.0),
    )?;
    for z in [c(0.3, 0.0), c(-2.7, 1.3), c(0.5, 12.0), c(7.2, -3.1)] {
        let lhs = e(gamma(z))? * e(gamma(1.0 - z))?;
        track("reflection", lhs, PI / (PI * z).sin())?;
    }
    let one = c(1.0, 0.0);
    track(
        "2F1(1,1;2;-1)",
        e(hyp2f1(HypArgs::new(one, one, c(2.0, 0.0), -1.0)))?,
        c(LN_2, 0.0),
    )?;
    track(
        "2F1(1/2,1/2;2;1)",
        e(hyp2f1(HypArgs::new(
            c(0.5, 0.0),
            c(0.5, 0.0),
            c(2.0, 0.0),
            1.0,
        )))?,
        c(4.0 / PI, 0.0),
    )?;
    let abc = [c(0.3, 0.7), c(-1.2, 2.0), c(2.5, -1.0)];
    for a in abc {
        for b in abc {
            for cc in [c(1.5, 0.5), c(3.0, -2.0)] {
                for z in [-0.9, -0.4, 0.2, 0.45] {
                    let base = e(hyp2f1(HypArgs::new(a, b, cc, z)))?;
                    let w = z / (z - 1.0);
                    let pfaff = Complex::new(1.0 - z, 0.0).powc(-a)
                        * e(hyp2f1(HypArgs::new(a, cc - b, cc, w)))?;
                    track("Pfaff", pfaff, base)?;
                    let euler = Complex::new(1.0 - z, 0.0).powc(cc - a - b)
                        * e(hyp2f1(HypArgs::new(cc - a, cc - b, cc, z)))?;
                    track("Euler", euler, base)?;
                }
            }
        }
    }
    Ok(format!("identities hold, worst relative error {worst:.2e}"))
}

fn oracle_integrity(ctx: &Ctx) -> Outcome {
    let cfg = IntegrationConfig::default();
    let wider = IntegrationConfig {
        span_factor: cfg.span_factor + 4.0,
        ..cfg
    };
    let tighter = IntegrationConfig {
        rel_tol: cfg.rel_tol / 10.0,
        ..cfg
    };
    let mut worst_shift: f64 = 0.0;
    let mut worst_drift: f64 = 0.0;
    for p in [
        anchor(0.3),
        params(4.0, 0.5, 3.0),
        params(0.5, 5.0, 0.05),
        params(2.5, 4.0, 1.0),
    ] {
        let base = integrate(&p, &cfg).map_err(|e| e.to_string())?;
        worst_drift = worst_drift.max(base.norm_drift);
        for other_cfg in [wider, tighter] {
            let other = integrate(&p, &other_cfg).map_err(|e| e.to_string())?;
            worst_drift = worst_drift.max(other.norm_drift);
            worst_shift = worst_shift
                .max((other.f_num - base.f_num).abs())
                .max((other.b_num - base.b_num).abs());
        }
    }
    let detail = format!(
        "max change under N+4 / rel_tol/10: {worst_shift:.2e}, max drift {worst_drift:.2e}"
    );
    if worst_shift < 1e-7 * ctx.slack && worst_drift < 1e-9 * ctx.slack {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn residual(ctx: &Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let p = rng.random_range(-4.0..4.0);
        let a2 = rng.random_range(-4.0..4.0);
        let tau = 10f64.powf(rng.random_range(-1.0..0.7));
        let t0 = rng.random_range(-2.0..2.0);
        let params =
            StepParameters::new(1.0, 1.0, p, 0.0, a2, t0, tau).map_err(|e| e.to_string())?;
        let sol = build_solution(&params)
            .and_then(|s| match_at_t0(&s, &params))
            .map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let t = t0 + tau * rng.random_range(-4.0..4.0);
            let r = second_order_residual(&sol, t, &params).map_err(|e| e.to_string())?;
            worst = worst.max(r);
        }
    }
    let detail = format!("200 samples, max relative residual {worst:.2e}");
    if worst < 1e-7 * ctx.slack {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn reproducibility(_ctx: &Ctx) -> Outcome {
    let r3 = 3f64.sqrt();
    let spec = SweepSpec {
        variable: SweepVar::Tau,
        start: 1e-3,
        stop: 5.0,
        count: 64,
        log: true,
        negative_branch: false,
        lock_a1: false,
        fixed: PhysicsArgs {
            m: 1.0,
            q: 1.0,
            p: Some(r3),
            a1: 0.0,
            a2: Some(2.0 * r3),
            t0: 0.0,
            tau: None,
        },
    };
    let cfg = IntegrationConfig::default();
    let first = sweep::render_csv(&spec, &sweep::run(&spec, Some(16), &cfg), true);
    let second = sweep::render_csv(&spec, &sweep::run(&spec, Some(16), &cfg), true);
    if first == second {
        Ok(format!(
            "two sweeps of 64 rows are byte-identical ({} bytes)",
            first.len()
        ))
    } else {
        Err("repeated sweeps differ".into())
    }
}

/// Runs every check; `break_tolerance` shrinks all tolerances by 1e-12.
pub fn run_checks(break_tolerance: bool) -> Vec<Check> {
    let ctx = Ctx {
        slack: if break_tolerance { 1e-12 } else { 1.0 },
    };
    vec![
        timed("normalization", || normalization(&ctx)),
        timed("analytic_vs_oracle", || analytic_vs_oracle(&ctx)),
        timed("sharp_limit", || sharp_limit(&ctx)),
        timed("figure_claims", || figure_claims(&ctx)),
        timed("adiabatic", || adiabatic(&ctx)),
        timed("special_functions", || special_functions(&ctx)),
        timed("oracle_integrity", || oracle_integrity(&ctx)),
        timed("residual", || residual(&ctx)),
        timed("reproducibility", || reproducibility(&ctx)),
    ]
}
