//! Command-line front end for `tempstep-core`.
//!
//! [`run`] takes the argument list and output streams so the whole binary can
//! be driven from tests.

// `!(x > y)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod error;
pub mod figure;
pub mod record;
pub mod selftest;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use tempstep_core::IntegrationConfig;

use crate::args::{
    Cli, Command, Figure2Args, Format, ScatterArgs, SelftestArgs, SweepArgs, SweepFormat,
};
pub use crate::error::{CliError, CliResult};
use crate::figure::FigureSpec;
use crate::record::{evaluate, Inputs};
use crate::sweep::SweepSpec;

const TAU_MESSAGE: &str = "tau must be positive; use `scatter --sharp` for the Heaviside limit";

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Scatter(a) => cmd_scatter(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Figure2(a) => cmd_figure2(a, out),
        Command::Selftest(a) => cmd_selftest(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io("<stdout>", e))
}

pub fn cmd_scatter(a: ScatterArgs, out: &mut dyn Write) -> CliResult<()> {
    let ph = a.physics;
    let p =
        ph.p.ok_or_else(|| CliError::Validation("--p is required".into()))?;
    let a2 = ph
        .a2
        .ok_or_else(|| CliError::Validation("--a2 is required".into()))?;
    let tau = if a.sharp {
        if a.oracle {
            return Err(CliError::Validation("--oracle needs a finite --tau".into()));
        }
        0.0
    } else {
        match ph.tau {
            Some(t) if t > 0.0 && t.is_finite() => t,
            Some(_) => return Err(CliError::Validation(TAU_MESSAGE.into())),
            None => {
                return Err(CliError::Validation(
                    "--tau is required (or --sharp for the Heaviside limit)".into(),
                ))
            }
        }
    };
    let inputs = Inputs {
        m: ph.m,
        q: ph.q,
        p,
        a1: ph.a1,
        a2,
        t0: ph.t0,
        tau,
    };
    let cfg = IntegrationConfig::default();
    let record = evaluate(&inputs, a.oracle.then_some(&cfg))?;
    let text = match a.format {
        Format::Json => record::to_json(&record) + "\n",
        Format::Csv => record::to_csv(&inputs, &record),
        Format::Human => {
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            record::to_human(&inputs, &record, now)
        }
    };
    emit(out, &text)
}

pub fn cmd_sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let spec = SweepSpec {
        variable: a.sweep_var,
        start: a.start,
        stop: a.stop,
        count: a.count,
        log: a.log,
        negative_branch: a.negative_branch,
        lock_a1: a.lock_a1,
        fixed: a.physics,
    };
    spec.validate()?;
    if a.oracle_every == Some(0) {
        return Err(CliError::Validation(
            "--oracle-every must be positive".into(),
        ));
    }
    let rows = sweep::run(&spec, a.oracle_every, &IntegrationConfig::default());
    match a.format {
        SweepFormat::Csv => emit(
            out,
            &sweep::render_csv(&spec, &rows, a.oracle_every.is_some()),
        )?,
        SweepFormat::Json => {
            let mut text = String::new();
            for row in &rows {
                match &row.result {
                    Ok(rec) => {
                        text += &record::to_json(rec);
                        text.push('\n');
                    }
                    Err(reason) => {
                        let _ = writeln!(
                            err,
                            "warning: {} = {}: {reason}",
                            spec.variable.column(),
                            row.x
                        );
                    }
                }
            }
            emit(out, &text)?;
        }
    }
    if sweep::all_failed(&rows) {
        return Err(CliError::AllPointsFailed(format!(
            "all {} sweep points failed",
            rows.len()
        )));
    }
    Ok(())
}

pub fn cmd_figure2(a: Figure2Args, out: &mut dyn Write) -> CliResult<()> {
    let spec = FigureSpec::new(a.sweep_var, a.start, a.stop, a.count)?;
    let (paths, panels) = figure::write_figure(&spec, &a.out_dir)?;
    let mut text = String::new();
    for path in &paths {
        text += &format!("wrote {}\n", path.display());
    }
    text += &format!(
        "tau = {}: max |B - B_sharp| = {:.3e}\ntau = {}: max B = {:.4}\n",
        panels[0].tau,
        panels[0].max_sharp_deviation(),
        panels[1].tau,
        panels[1].max_backward()
    );
    emit(out, &text)?;
    let failures: usize = panels.iter().map(|p| p.failures()).sum();
    if failures == panels.iter().map(|p| p.rows.len()).sum::<usize>() {
        return Err(CliError::AllPointsFailed(
            "every figure point failed".into(),
        ));
    }
    Ok(())
}

pub fn cmd_selftest(a: SelftestArgs, out: &mut dyn Write) -> CliResult<()> {
    let checks = selftest::run_checks(a.break_tolerance);
    let mut text = String::new();
    if a.json {
        for c in &checks {
            text += &serde_json::to_string(c).expect("plain record");
            text.push('\n');
        }
    } else {
        for c in &checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            text += &format!(
                "{verdict} {:<20} {:>7.2}s  {}\n",
                c.name, c.seconds, c.detail
            );
        }
        let passed = checks.iter().filter(|c| c.passed).count();
        text += &format!("{passed}/{} checks passed\n", checks.len());
    }
    emit(out, &text)?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SelftestFailed(failed.join(", ")))
    }
}
