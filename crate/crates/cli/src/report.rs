//! Deterministic report assembly and JSON rendering.
//!
//! Reports hold named quantities plus a list of checks, where every check
//! couples the measured value to the tolerance it was tested against; a
//! report cannot contain one without the other. Field order is insertion
//! order and all floats print as 12-significant-digit scientific notation
//! with a signed two-digit exponent, so rerunning a command produces
//! byte-identical output.

use csq_core::{CMatrix, Complex64};

/// %.12e with a normalized exponent (`e+00` style); canonicalizes -0.0.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_owned();
    }
    if x == 0.0 {
        return "0.000000000000e+00".to_owned();
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific notation");
    let e: i32 = exp.parse().expect("exponent digits");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", e.abs())
}

/// A quantity a report can carry.
pub enum Value {
    Null,
    Int(i64),
    Float(f64),
    Str(String),
    Matrix(CMatrix),
    Floats(Vec<f64>),
    /// Array of flat objects, rendered one object per line.
    Rows(Vec<Vec<(String, Value)>>),
}

/// One executed check: a value, the bound it was compared against, and the
/// direction of the comparison.
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: &'static str,
    pub pass: bool,
}

pub struct Report {
    command: String,
    fields: Vec<(String, Value)>,
    checks: Vec<CheckRow>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            fields: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, value: Value) {
        self.fields.push((name.into(), value));
    }

    /// Residual check: passes when value < tolerance.
    pub fn residual(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.checks.push(CheckRow {
            name: name.into(),
            value,
            tolerance,
            comparison: "<",
            pass: value.is_finite() && value < tolerance,
        });
    }

    /// Floor check: passes when value > tolerance.
    pub fn floor(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.checks.push(CheckRow {
            name: name.into(),
            value,
            tolerance,
            comparison: ">",
            pass: value.is_finite() && value > tolerance,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str("  \"command\": ");
        write_str(&mut out, &self.command);
        for (name, value) in &self.fields {
            out.push_str(",\n  ");
            write_str(&mut out, name);
            out.push_str(": ");
            write_value(&mut out, value);
        }
        out.push_str(",\n  \"checks\": [");
        for (i, check) in self.checks.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str("\n    ");
            write_check(&mut out, check);
        }
        if self.checks.is_empty() {
            out.push(']');
        } else {
            out.push_str("\n  ]");
        }
        out.push_str(",\n  \"pass\": ");
        out.push_str(if self.passed() { "true" } else { "false" });
        out.push_str("\n}");
        out
    }
}

/// Renders one value standalone (used by file exports).
pub fn value_to_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value);
    out
}

fn write_check(out: &mut String, check: &CheckRow) {
    out.push_str("{\"name\": ");
    write_str(out, &check.name);
    out.push_str(", \"value\": ");
    out.push_str(&fmt_float(check.value));
    out.push_str(", \"tolerance\": ");
    out.push_str(&fmt_float(check.tolerance));
    out.push_str(", \"comparison\": ");
    write_str(out, check.comparison);
    out.push_str(", \"pass\": ");
    out.push_str(if check.pass { "true" } else { "false" });
    out.push('}');
}

fn write_value(out: &mut String, value: &Value) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Int(i) => out.push_str(&i.to_string()),
        Value::Float(x) => out.push_str(&fmt_float(*x)),
        Value::Str(s) => write_str(out, s),
        Value::Matrix(m) => write_matrix(out, m),
        Value::Floats(xs) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&fmt_float(*x));
            }
            out.push(']');
        }
        Value::Rows(rows) => {
            out.push('[');
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str("\n    {");
                for (j, (name, v)) in row.iter().enumerate() {
                    if j > 0 {
                        out.push_str(", ");
                    }
                    write_str(out, name);
                    out.push_str(": ");
                    write_value(out, v);
                }
                out.push('}');
            }
            if rows.is_empty() {
                out.push(']');
            } else {
                out.push_str("\n  ]");
            }
        }
    }
}

fn write_matrix(out: &mut String, m: &CMatrix) {
    out.push_str("{\"dim\": ");
    out.push_str(&m.nrows().to_string());
    let part = |out: &mut String, pick: fn(&Complex64) -> f64| {
        out.push('[');
        for i in 0..m.nrows() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push('[');
            for j in 0..m.ncols() {
                if j > 0 {
                    out.push_str(", ");
                }
                out.push_str(&fmt_float(pick(&m[(i, j)])));
            }
            out.push(']');
        }
        out.push(']');
    };
    out.push_str(", \"re\": ");
    part(out, |z| z.re);
    out.push_str(", \"im\": ");
    part(out, |z| z.im);
    out.push('}');
}

fn write_str(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}
