//! The two-panel comparison of a near-instantaneous step with a soft one.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::args::FigureAxis;
use crate::error::{CliError, CliResult};
use crate::record::{
    evaluate, number, write_preamble, Inputs, Record, INPUT_COLUMNS, OUTPUT_COLUMNS,
};

pub const SHARP_TAU: f64 = 1e-4;
pub const SOFT_TAU: f64 = 0.5;
/// Incident energy in units of the mass.
pub const ENERGY_RATIO: f64 = 2.0;

const SHARP_COLUMNS: [&str; 4] = ["F_sharp", "B_sharp", "F_u_sharp", "B_u_sharp"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureSpec {
    pub axis: FigureAxis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub m: f64,
    pub q: f64,
}

impl FigureSpec {
    pub fn new(
        axis: FigureAxis,
        start: Option<f64>,
        stop: Option<f64>,
        count: usize,
    ) -> CliResult<Self> {
        let (lo, hi) = match axis {
            FigureAxis::A2 => (0.0, 8.0),
            FigureAxis::P => (-1.0, 7.0),
        };
        let spec = FigureSpec {
            axis,
            start: start.unwrap_or(lo),
            stop: stop.unwrap_or(hi),
            count,
            m: 1.0,
            q: 1.0,
        };
        if count < 2 {
            return Err(CliError::Validation("--count must be at least 2".into()));
        }
        if !(spec.start.is_finite() && spec.stop.is_finite()) || spec.start == spec.stop {
            return Err(CliError::Validation(
                "--start and --stop must be finite and distinct".into(),
            ));
        }
        Ok(spec)
    }

    /// Momentum giving `E1 = 2m` with `A1 = 0`.
    pub fn incident_momentum(&self) -> f64 {
        self.m * (ENERGY_RATIO * ENERGY_RATIO - 1.0).sqrt()
    }

    /// Step height held fixed on the momentum axis.
    pub fn fixed_a2(&self) -> f64 {
        2.0 * self.incident_momentum() / self.q
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (i as f64 / last)
                }
            })
            .collect()
    }

    pub fn inputs(&self, x: f64, tau: f64) -> Inputs {
        let (p, a2) = match self.axis {
            FigureAxis::A2 => (self.incident_momentum(), x),
            FigureAxis::P => (x, self.fixed_a2()),
        };
        Inputs {
            m: self.m,
            q: self.q,
            p,
            a1: 0.0,
            a2,
            t0: 0.0,
            tau,
        }
    }

    fn column(&self) -> &'static str {
        match self.axis {
            FigureAxis::A2 => "qA2",
            FigureAxis::P => "p",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelRow {
    pub x: f64,
    pub inputs: Inputs,
    pub soft: Result<Record, String>,
    pub sharp: Result<Record, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub tau: f64,
    pub rows: Vec<PanelRow>,
}

impl Panel {
    /// Largest `|B - B_sharp|` over rows where both sides succeeded.
    pub fn max_sharp_deviation(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| match (&r.soft, &r.sharp) {
                (Ok(s), Ok(h)) => Some((s.backward - h.backward).abs()),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    pub fn max_backward(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.soft.as_ref().ok().map(|s| s.backward))
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.soft.is_err() || r.sharp.is_err())
            .count()
    }
}

pub fn compute_panel(spec: &FigureSpec, tau: f64) -> Panel {
    let rows = spec
        .values()
        .par_iter()
        .map(|&x| {
            let inputs = spec.inputs(x, tau);
            let sharp_inputs = Inputs { tau: 0.0, ..inputs };
            PanelRow {
                x,
                inputs,
                soft: evaluate(&inputs, None).map_err(|e| e.to_string()),
                sharp: evaluate(&sharp_inputs, None).map_err(|e| e.to_string()),
            }
        })
        .collect();
    Panel { tau, rows }
}

fn header(spec: &FigureSpec) -> Vec<&'static str> {
    let mut h = vec![spec.column()];
    h.extend(INPUT_COLUMNS);
    h.extend(OUTPUT_COLUMNS);
    h.extend(SHARP_COLUMNS);
    h.push("diagnostic");
    h
}

pub fn render_panel(spec: &FigureSpec, panel: &Panel) -> String {
    let mut out = Vec::new();
    let axis = match spec.axis {
        FigureAxis::A2 => format!("step strength qA2 at E1/m = {ENERGY_RATIO}, A1 = 0"),
        FigureAxis::P => format!("canonical momentum p at A1 = 0, A2 = {}", spec.fixed_a2()),
    };
    write_preamble(&mut out, &[format!("tau = {}; x axis: {axis}", panel.tau)])
        .expect("writing to memory");
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header(spec)).expect("writing to memory");
        for row in &panel.rows {
            let mut cells = vec![number(row.x)];
            let i = row.inputs;
            cells.extend([i.m, i.q, i.p, i.a1, i.a2, i.t0, i.tau].map(number));
            let mut diagnostic = String::new();
            match &row.soft {
                Ok(rec) => cells.extend(rec.cells(&i).into_iter().skip(INPUT_COLUMNS.len())),
                Err(e) => {
                    cells.extend(vec![String::new(); OUTPUT_COLUMNS.len()]);
                    diagnostic = e.clone();
                }
            }
            match &row.sharp {
                Ok(rec) => cells.extend(
                    [
                        rec.forward,
                        rec.backward,
                        rec.forward_unitary,
                        rec.backward_unitary,
                    ]
                    .map(number),
                ),
                Err(e) => {
                    cells.extend(vec![String::new(); SHARP_COLUMNS.len()]);
                    if diagnostic.is_empty() {
                        diagnostic = format!("sharp: {e}");
                    }
                }
            }
            cells.push(diagnostic.replace(['\n', '\r'], " "));
            w.write_record(&cells).expect("writing to memory");
        }
        w.flush().expect("writing to memory");
    }
    String::from_utf8(out).expect("UTF-8 output")
}

pub fn gnuplot_script(spec: &FigureSpec, files: [&str; 2]) -> String {
    let h = header(spec);
    let col = |name: &str| h.iter().position(|c| *c == name).expect("known column") + 1;
    let (x, big_f, big_b, fu, bu, bs) = (
        col(spec.column()),
        col("F"),
        col("B"),
        col("F_u"),
        col("B_u"),
        col("B_sharp"),
    );
    let xlabel = match spec.axis {
        FigureAxis::A2 => "qA_2 / m",
        FigureAxis::P => "p / m",
    };
    let mut s = String::new();
    s += "# gnuplot script; run with `gnuplot fig2.gp`\n";
    // Three comment lines and the column header precede the data.
    s += "set datafile separator ','\n";
    s += "set terminal pngcairo size 1200,500\n";
    s += "set output 'fig2.png'\n";
    s += "set multiplot layout 1,2\n";
    s += &format!("set xlabel '{xlabel}'\n");
    s += "set ylabel 'probability'\n";
    s += "set yrange [0:1]\n";
    for (file, title) in files.iter().zip(["(a) tau = 0.0001", "(b) tau = 0.5"]) {
        s += &format!("set title '{title}'\n");
        s += &format!(
            "plot '{file}' skip 4 using {x}:{big_f} with lines title 'F', \\\n     '{file}' skip 4 using {x}:{big_b} with lines title 'B', \\\n     '{file}' skip 4 using {x}:{fu} with lines dt 2 title 'F_u', \\\n     '{file}' skip 4 using {x}:{bu} with lines dt 2 title 'B_u', \\\n     '{file}' skip 4 using {x}:{bs} with points pt 7 ps 0.3 title 'B (sharp)'\n"
        );
    }
    s += "unset multiplot\n";
    s
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes `fig2a.csv`, `fig2b.csv` and `fig2.gp` into `dir`.
pub fn write_figure(spec: &FigureSpec, dir: &Path) -> CliResult<(Vec<PathBuf>, [Panel; 2])> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let panels = [
        compute_panel(spec, SHARP_TAU),
        compute_panel(spec, SOFT_TAU),
    ];
    let names = ["fig2a.csv", "fig2b.csv"];
    let mut paths = Vec::new();
    for (panel, name) in panels.iter().zip(names) {
        let path = dir.join(name);
        write(&path, &render_panel(spec, panel))?;
        paths.push(path);
    }
    let script = dir.join("fig2.gp");
    write(&script, &gnuplot_script(spec, names))?;
    paths.push(script);
    Ok((paths, panels))
}
