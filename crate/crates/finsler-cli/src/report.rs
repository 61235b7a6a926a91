//! Report model and renderers. Reports are deterministic: fixed field order,
//! no map iteration, and every numeric printed with 17 significant digits so
//! it round-trips to the exact double.

use nalgebra::DMatrix;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub norm: String,
    pub dimension: usize,
    pub method: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckRecord>,
    pub values: Vec<ValueRecord>,
    pub matrices: Vec<MatrixRecord>,
    pub errors: Vec<String>,
    pub exit_status: i32,
}

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// "<=" or ">=".
    pub relation: String,
    /// Asserted checks decide the exit status; unasserted ones are
    /// observables that are reported either way.
    pub asserted: bool,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct ValueRecord {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct MatrixRecord {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<f64>>,
}

/// Accumulates records during a command run; `finish` fixes the exit status.
pub struct ReportBuilder {
    command: String,
    norm: String,
    dimension: usize,
    method: String,
    seed: u64,
    samples: usize,
    checks: Vec<CheckRecord>,
    values: Vec<ValueRecord>,
    matrices: Vec<MatrixRecord>,
    errors: Vec<String>,
}

impl ReportBuilder {
    pub fn new(
        command: &str,
        norm: &str,
        dimension: usize,
        method: &str,
        seed: u64,
        samples: usize,
    ) -> Self {
        ReportBuilder {
            command: command.to_string(),
            norm: norm.to_string(),
            dimension,
            method: method.to_string(),
            seed,
            samples,
            checks: Vec::new(),
            values: Vec::new(),
            matrices: Vec::new(),
            errors: Vec::new(),
        }
    }

    /// Records a bound comparison; `relation` is "<=" or ">=".
    pub fn check(&mut self, name: &str, value: f64, bound: f64, relation: &str, asserted: bool) {
        let pass = match relation {
            ">=" => value >= bound,
            _ => value <= bound,
        };
        self.checks.push(CheckRecord {
            name: name.to_string(),
            value,
            bound,
            relation: relation.to_string(),
            asserted,
            pass,
        });
    }

    pub fn value(&mut self, name: &str, value: f64) {
        self.values.push(ValueRecord {
            name: name.to_string(),
            value,
        });
    }

    pub fn matrix(&mut self, name: &str, m: &DMatrix<f64>) {
        let data = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect();
        self.matrices.push(MatrixRecord {
            name: name.to_string(),
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        });
    }

    pub fn row(&mut self, name: &str, values: &[f64]) {
        self.matrices.push(MatrixRecord {
            name: name.to_string(),
            rows: 1,
            cols: values.len(),
            data: vec![values.to_vec()],
        });
    }

    /// Records an in-band computation error; any error forces exit status 1.
    pub fn error(&mut self, message: String) {
        self.errors.push(message);
    }

    pub fn finish(self) -> Report {
        let failed = self.checks.iter().any(|c| c.asserted && !c.pass) || !self.errors.is_empty();
        Report {
            schema: SCHEMA_VERSION,
            command: self.command,
            norm: self.norm,
            dimension: self.dimension,
            method: self.method,
            seed: self.seed,
            samples: self.samples,
            checks: self.checks,
            values: self.values,
            matrices: self.matrices,
            errors: self.errors,
            exit_status: if failed { 1 } else { 0 },
        }
    }
}

/// 17 significant digits: enough to reconstruct the exact double.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("finsler report (schema {})\n", report.schema));
    out.push_str(&format!("command: {}\n", report.command));
    out.push_str(&format!("norm: {}\n", report.norm));
    out.push_str(&format!("dimension: {}\n", report.dimension));
    out.push_str(&format!("method: {}\n", report.method));
    out.push_str(&format!("seed: {}\n", report.seed));
    out.push_str(&format!("samples: {}\n", report.samples));
    for v in &report.values {
        out.push_str(&format!("value {} = {}\n", v.name, full(v.value)));
    }
    for c in &report.checks {
        out.push_str(&format!(
            "check {}: {} {} {} [{}] {}\n",
            c.name,
            full(c.value),
            c.relation,
            full(c.bound),
            if c.asserted { "asserted" } else { "observed" },
            if c.pass { "PASS" } else { "FAIL" },
        ));
    }
    for m in &report.matrices {
        out.push_str(&format!("matrix {} ({}x{}):\n", m.name, m.rows, m.cols));
        for row in &m.data {
            let cells: Vec<String> = row.iter().map(|x| full(*x)).collect();
            out.push_str(&format!("  {}\n", cells.join(" ")));
        }
    }
    for e in &report.errors {
        out.push_str(&format!("error: {e}\n"));
    }
    out.push_str(&format!("exit: {}\n", report.exit_status));
    out
}

pub fn render_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
