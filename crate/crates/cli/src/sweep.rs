use rayon::prelude::*;
use tempstep_core::IntegrationConfig;

use crate::args::{PhysicsArgs, SweepVar};
use crate::error::{CliError, CliResult};
use crate::record::{
    evaluate, number, write_preamble, Inputs, Record, INPUT_COLUMNS, ORACLE_COLUMNS, OUTPUT_COLUMNS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
    pub negative_branch: bool,
    pub lock_a1: bool,
    pub fixed: PhysicsArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub x: f64,
    pub inputs: Option<Inputs>,
    pub result: Result<Record, String>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.count < 2 {
            return Err(invalid("--count must be at least 2"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start == self.stop {
            return Err(invalid("--start and --stop must be finite and distinct"));
        }
        if self.log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(invalid("--log needs positive --start and --stop"));
        }
        let f = &self.fixed;
        let need = |present: bool, flag: &str, var: SweepVar| -> CliResult<()> {
            if present || self.variable == var {
                Ok(())
            } else {
                Err(invalid(format!(
                    "--{flag} is required unless it is the swept variable"
                )))
            }
        };
        match self.variable {
            SweepVar::EnergyRatio => {
                if f.p.is_some() {
                    return Err(invalid("--p is fixed by the energy ratio; drop it"));
                }
            }
            _ => need(f.p.is_some(), "p", SweepVar::P)?,
        }
        need(f.a2.is_some(), "a2", SweepVar::A2)?;
        need(f.tau.is_some(), "tau", SweepVar::Tau)?;
        if self.variable == SweepVar::Tau && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(invalid(
                "tau must be positive; use `scatter --sharp` for the Heaviside limit",
            ));
        }
        if let Some(tau) = f.tau {
            if self.variable != SweepVar::Tau && !(tau > 0.0) {
                return Err(invalid(
                    "tau must be positive; use `scatter --sharp` for the Heaviside limit",
                ));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    return self.stop;
                }
                let u = i as f64 / last;
                if self.log {
                    (self.start.ln() + (self.stop.ln() - self.start.ln()) * u).exp()
                } else {
                    self.start + (self.stop - self.start) * u
                }
            })
            .collect()
    }

    pub fn point(&self, x: f64) -> Result<Inputs, String> {
        let f = &self.fixed;
        let mut inputs = Inputs {
            m: f.m,
            q: f.q,
            p: f.p.unwrap_or(0.0),
            a1: f.a1,
            a2: f.a2.unwrap_or(0.0),
            t0: f.t0,
            tau: f.tau.unwrap_or(0.0),
        };
        match self.variable {
            SweepVar::P => inputs.p = x,
            SweepVar::A2 => inputs.a2 = x,
            SweepVar::Tau => inputs.tau = x,
            SweepVar::EnergyRatio => {
                if !(x >= 1.0) {
                    return Err(format!("E1/m = {x} is below 1; no real momentum"));
                }
                let kinetic = inputs.m * (x * x - 1.0).sqrt();
                let kinetic = if self.negative_branch {
                    -kinetic
                } else {
                    kinetic
                };
                inputs.p = inputs.q * inputs.a1 + kinetic;
            }
        }
        if self.lock_a1 {
            inputs.a1 = inputs.a2;
        }
        Ok(inputs)
    }

    fn preamble(&self) -> Vec<String> {
        vec![format!(
            "sweep {} from {} to {} over {} {} points{}{}",
            self.variable.column(),
            self.start,
            self.stop,
            self.count,
            if self.log { "log-spaced" } else { "linear" },
            if self.lock_a1 {
                ", a1 locked to a2"
            } else {
                ""
            },
            if self.negative_branch {
                ", negative momentum branch"
            } else {
                ""
            },
        )]
    }
}

/// Evaluates every point in parallel; rows come back in sweep order.
pub fn run(spec: &SweepSpec, oracle_every: Option<usize>, cfg: &IntegrationConfig) -> Vec<Row> {
    let values = spec.values();
    values
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let with_oracle = oracle_every.is_some_and(|k| k > 0 && i % k == 0);
            match spec.point(x) {
                Ok(inputs) => Row {
                    x,
                    inputs: Some(inputs),
                    result: evaluate(&inputs, with_oracle.then_some(cfg))
                        .map_err(|e| e.to_string()),
                },
                Err(reason) => Row {
                    x,
                    inputs: None,
                    result: Err(reason),
                },
            }
        })
        .collect()
}

pub fn header(spec: &SweepSpec, oracle: bool) -> Vec<&'static str> {
    let mut h = vec![spec.variable.column()];
    h.extend(INPUT_COLUMNS);
    h.extend(OUTPUT_COLUMNS);
    if oracle {
        h.extend(ORACLE_COLUMNS);
    }
    h.push("diagnostic");
    h
}

fn sanitize(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

pub fn render_csv(spec: &SweepSpec, rows: &[Row], oracle: bool) -> String {
    let mut out = Vec::new();
    write_preamble(&mut out, &spec.preamble()).expect("writing to memory");
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header(spec, oracle))
            .expect("writing to memory");
        let width = header(spec, oracle).len();
        for row in rows {
            let mut cells = vec![number(row.x)];
            match (&row.result, &row.inputs) {
                (Ok(rec), Some(inputs)) => {
                    cells.extend(rec.cells(inputs));
                    if oracle {
                        cells.extend(rec.oracle_cells());
                    }
                    cells.push(String::new());
                }
                (result, inputs) => {
                    let echoed = match inputs {
                        Some(i) => [i.m, i.q, i.p, i.a1, i.a2, i.t0, i.tau]
                            .map(number)
                            .to_vec(),
                        // Only the energy ratio can fail before a point exists; p stays blank.
                        None => {
                            let f = &spec.fixed;
                            let opt = |v: Option<f64>| v.map(number).unwrap_or_default();
                            vec![
                                number(f.m),
                                number(f.q),
                                String::new(),
                                number(f.a1),
                                opt(f.a2),
                                number(f.t0),
                                opt(f.tau),
                            ]
                        }
                    };
                    cells.extend(echoed);
                    cells.resize(width - 1, String::new());
                    cells.push(sanitize(result.as_ref().err().map_or("", |s| s.as_str())));
                }
            }
            w.write_record(&cells).expect("writing to memory");
        }
        w.flush().expect("writing to memory");
    }
    String::from_utf8(out).expect("UTF-8 output")
}

pub fn all_failed(rows: &[Row]) -> bool {
    rows.iter().all(|r| r.result.is_err())
}
