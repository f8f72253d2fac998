use std::io::Write;

use serde::Serialize;
use tempstep_core::{
    compare, scatter, sharp_step, IntegrationConfig, Kinematics, ScatteringResult, StepParameters,
};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const UNITS: &str = "natural units, hbar=c=1";

/// Largest tolerated `|F + B - 1|` in any emitted row.
pub const NORMALIZATION_LIMIT: f64 = 1e-12;

pub const INPUT_COLUMNS: [&str; 7] = ["m", "q", "p", "a1", "a2", "t0", "tau"];
pub const OUTPUT_COLUMNS: [&str; 8] = ["e1", "e2", "f", "b", "F", "B", "F_u", "B_u"];
pub const ORACLE_COLUMNS: [&str; 2] = ["oracle_dev_f", "oracle_dev_b"];

/// A complete parameter point. `tau = 0` stands for the Heaviside step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inputs {
    pub m: f64,
    pub q: f64,
    pub p: f64,
    pub a1: f64,
    pub a2: f64,
    pub t0: f64,
    pub tau: f64,
}

impl Inputs {
    pub fn is_sharp(&self) -> bool {
        self.tau == 0.0
    }

    pub fn kinematics(&self) -> tempstep_core::Result<Kinematics> {
        Kinematics::new(self.m, self.q, self.p, self.a1, self.a2)
    }

    pub fn step(&self) -> tempstep_core::Result<StepParameters> {
        StepParameters::new(self.m, self.q, self.p, self.a1, self.a2, self.t0, self.tau)
    }

    fn cells(&self) -> [f64; 7] {
        [self.m, self.q, self.p, self.a1, self.a2, self.t0, self.tau]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Record {
    pub m: f64,
    pub q: f64,
    pub p: f64,
    pub a1: f64,
    pub a2: f64,
    pub t0: f64,
    pub tau: f64,
    pub e1: f64,
    pub e2: f64,
    pub f: f64,
    pub b: f64,
    #[serde(rename = "F")]
    pub forward: f64,
    #[serde(rename = "B")]
    pub backward: f64,
    #[serde(rename = "F_u")]
    pub forward_unitary: f64,
    #[serde(rename = "B_u")]
    pub backward_unitary: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_dev_f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_dev_b: Option<f64>,
}

impl Record {
    fn new(inputs: &Inputs, r: &ScatteringResult) -> Self {
        Record {
            m: inputs.m,
            q: inputs.q,
            p: inputs.p,
            a1: inputs.a1,
            a2: inputs.a2,
            t0: inputs.t0,
            tau: inputs.tau,
            e1: r.modes.e1,
            e2: r.modes.e2,
            f: r.f,
            b: r.b,
            forward: r.forward,
            backward: r.backward,
            forward_unitary: r.forward_unitary,
            backward_unitary: r.backward_unitary,
            oracle_dev_f: None,
            oracle_dev_b: None,
        }
    }

    fn outputs(&self) -> [f64; 8] {
        [
            self.e1,
            self.e2,
            self.f,
            self.b,
            self.forward,
            self.backward,
            self.forward_unitary,
            self.backward_unitary,
        ]
    }

    /// Input and output cells in `INPUT_COLUMNS`, `OUTPUT_COLUMNS` order.
    pub fn cells(&self, inputs: &Inputs) -> Vec<String> {
        inputs
            .cells()
            .iter()
            .chain(self.outputs().iter())
            .map(|&x| number(x))
            .collect()
    }

    pub fn oracle_cells(&self) -> [String; 2] {
        [
            self.oracle_dev_f.map(number).unwrap_or_default(),
            self.oracle_dev_b.map(number).unwrap_or_default(),
        ]
    }
}

/// 17 significant digits in scientific notation.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Evaluates one point, optionally checking it against the integrator.
pub fn evaluate(inputs: &Inputs, oracle: Option<&IntegrationConfig>) -> CliResult<Record> {
    let (result, deviations) = if inputs.is_sharp() {
        if oracle.is_some() {
            return Err(CliError::Validation(
                "the integrator needs a finite tau; drop the oracle request for --sharp".into(),
            ));
        }
        (sharp_step(&inputs.kinematics()?)?, None)
    } else {
        let params = inputs.step()?;
        match oracle {
            Some(cfg) => {
                let report = compare(&params, cfg, f64::INFINITY)?;
                let dev = |q: &str| report.deviation(q).map(|d| d.absolute);
                (report.analytic, Some((dev("f"), dev("b"))))
            }
            None => (scatter(&params)?, None),
        }
    };
    let drift = (result.forward + result.backward - 1.0).abs();
    if !(drift <= NORMALIZATION_LIMIT) {
        return Err(CliError::Invariant(format!(
            "F + B deviates from 1 by {drift:.3e}"
        )));
    }
    let mut record = Record::new(inputs, &result);
    if let Some((f, b)) = deviations {
        record.oracle_dev_f = f;
        record.oracle_dev_b = b;
    }
    Ok(record)
}

/// `#`-prefixed header lines shared by every CSV file.
pub fn write_preamble<W: Write>(out: &mut W, extra: &[String]) -> std::io::Result<()> {
    writeln!(out, "# tempstep {VERSION}")?;
    writeln!(out, "# {UNITS}")?;
    for line in extra {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

pub fn to_csv(inputs: &Inputs, record: &Record) -> String {
    let mut out = Vec::new();
    write_preamble(&mut out, &[]).expect("writing to memory");
    let mut header: Vec<&str> = INPUT_COLUMNS
        .iter()
        .chain(OUTPUT_COLUMNS.iter())
        .copied()
        .collect();
    let mut row = record.cells(inputs);
    if record.oracle_dev_f.is_some() {
        header.extend(ORACLE_COLUMNS);
        row.extend(record.oracle_cells());
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&header).expect("writing to memory");
        w.write_record(&row).expect("writing to memory");
        w.flush().expect("writing to memory");
    }
    String::from_utf8(out).expect("ASCII output")
}

pub fn to_json(record: &Record) -> String {
    serde_json::to_string(record).expect("plain numeric record")
}

pub fn to_human(inputs: &Inputs, record: &Record, timestamp: u64) -> String {
    let mut s = format!("tempstep {VERSION} ({UNITS}), unix time {timestamp}\n");
    let tau = if inputs.is_sharp() {
        "sharp".to_string()
    } else {
        format!("{}", inputs.tau)
    };
    s += &format!(
        "inputs: m = {}, q = {}, p = {}, A1 = {}, A2 = {}, t0 = {}, tau = {tau}\n",
        inputs.m, inputs.q, inputs.p, inputs.a1, inputs.a2, inputs.t0
    );
    let rows = [
        ("E1", record.e1),
        ("E2", record.e2),
        ("f", record.f),
        ("b", record.b),
        ("F", record.forward),
        ("B", record.backward),
        ("F_u", record.forward_unitary),
        ("B_u", record.backward_unitary),
    ];
    for (name, value) in rows {
        s += &format!("  {name:<14} {value:.12}\n");
    }
    if let (Some(f), Some(b)) = (record.oracle_dev_f, record.oracle_dev_b) {
        s += &format!(
            "  {:<14} {f:.3e}\n  {:<14} {b:.3e}\n",
            "oracle |df|", "oracle |db|"
        );
    }
    s
}
