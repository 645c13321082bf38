//! Report model shared by all subcommands, with a text renderer
//! (aligned, fixed display precision) and a machine renderer (JSON with
//! every float carried as a full-precision decimal string, so parsing
//! the output recovers the exact values).

use qhist_core::{Complex64, Operator};
use serde_json::{json, Value as Json};

/// Classification of a failure, mapped onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ErrorClass {
    Validation,
    Evaluation,
    Internal,
}

impl ErrorClass {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorClass::Validation => 2,
            ErrorClass::Evaluation => 3,
            ErrorClass::Internal => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ErrorClass::Validation => "validation",
            ErrorClass::Evaluation => "evaluation",
            ErrorClass::Internal => "internal",
        }
    }
}

/// Maps a core error onto an exit-code class. Anything signalling a
/// disagreement between the two representations is internal; the rest
/// of the evaluation-time errors (forbidden history, alternative
/// endpoint, unknown event, …) are ordinary evaluation failures.
pub fn classify(err: &qhist_core::Error) -> ErrorClass {
    match err {
        qhist_core::Error::InternalConsistency { .. }
        | qhist_core::Error::RepresentationMismatch { .. } => ErrorClass::Internal,
        _ => ErrorClass::Evaluation,
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Str(String),
    Float(f64),
    Complex(Complex64),
    Int(i64),
    Bool(bool),
}

/// Full-precision decimal string for a float; `f64`'s display is the
/// shortest string that parses back to the same bits.
pub fn dec(x: f64) -> String {
    format!("{x}")
}

/// Fixed-point display, falling back to scientific notation for values
/// too small to show any significant digit at the chosen precision.
fn float_text(x: f64, precision: usize) -> String {
    if x != 0.0 && x.abs() < 10f64.powi(-(precision as i32)) {
        format!("{x:.2e}")
    } else {
        format!("{x:.precision$}")
    }
}

fn complex_json(z: Complex64) -> Json {
    json!({ "re": dec(z.re), "im": dec(z.im) })
}

impl Value {
    fn to_json(&self) -> Json {
        match self {
            Value::Str(s) => json!(s),
            Value::Float(x) => json!(dec(*x)),
            Value::Complex(z) => complex_json(*z),
            Value::Int(i) => json!(i),
            Value::Bool(b) => json!(b),
        }
    }

    fn to_text(&self, precision: usize) -> String {
        match self {
            Value::Str(s) => s.clone(),
            Value::Float(x) => float_text(*x, precision),
            Value::Complex(z) => format!("{:.precision$} {:+.precision$}i", z.re, z.im),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
        }
    }

    fn is_numeric(&self) -> bool {
        matches!(self, Value::Float(_) | Value::Complex(_) | Value::Int(_))
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, Default)]
pub enum Status {
    #[default]
    Ok,
    Error {
        class: ErrorClass,
        message: String,
    },
}

/// One titled section of a report: key/value fields, optional tables
/// and matrices, warnings, and an ok/error status.
#[derive(Debug, Clone)]
pub struct Block {
    pub title: String,
    pub fields: Vec<(String, Value)>,
    pub tables: Vec<(String, Table)>,
    pub matrices: Vec<(String, Operator)>,
    pub warnings: Vec<String>,
    pub status: Status,
    /// Overrides the report-wide display precision for this block.
    pub precision: Option<usize>,
}

impl Block {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            fields: Vec::new(),
            tables: Vec::new(),
            matrices: Vec::new(),
            warnings: Vec::new(),
            status: Status::Ok,
            precision: None,
        }
    }

    pub fn precision(mut self, precision: Option<usize>) -> Self {
        self.precision = precision;
        self
    }

    pub fn str(mut self, key: &str, value: impl Into<String>) -> Self {
        self.fields.push((key.into(), Value::Str(value.into())));
        self
    }

    pub fn float(mut self, key: &str, value: f64) -> Self {
        self.fields.push((key.into(), Value::Float(value)));
        self
    }

    pub fn complex(mut self, key: &str, value: Complex64) -> Self {
        self.fields.push((key.into(), Value::Complex(value)));
        self
    }

    pub fn int(mut self, key: &str, value: i64) -> Self {
        self.fields.push((key.into(), Value::Int(value)));
        self
    }

    pub fn bool(mut self, key: &str, value: bool) -> Self {
        self.fields.push((key.into(), Value::Bool(value)));
        self
    }

    pub fn table(mut self, label: &str, table: Table) -> Self {
        self.tables.push((label.into(), table));
        self
    }

    pub fn matrix(mut self, label: &str, m: Operator) -> Self {
        self.matrices.push((label.into(), m));
        self
    }

    pub fn warnings(mut self, warnings: &[String]) -> Self {
        self.warnings.extend_from_slice(warnings);
        self
    }

    pub fn fail(mut self, class: ErrorClass, message: impl Into<String>) -> Self {
        self.status = Status::Error {
            class,
            message: message.into(),
        };
        self
    }

    pub fn fail_with(self, err: &qhist_core::Error) -> Self {
        let class = classify(err);
        self.fail(class, err.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub meta: Vec<(String, Value)>,
    pub blocks: Vec<Block>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            meta: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn meta_str(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.push((key.into(), Value::Str(value.into())));
        self
    }

    pub fn meta_int(mut self, key: &str, value: i64) -> Self {
        self.meta.push((key.into(), Value::Int(value)));
        self
    }

    pub fn push(&mut self, block: Block) {
        self.blocks.push(block);
    }

    /// Every error in block order, paired with its class.
    pub fn errors(&self) -> Vec<(ErrorClass, String)> {
        self.blocks
            .iter()
            .filter_map(|b| match &b.status {
                Status::Ok => None,
                Status::Error { class, message } => {
                    Some((*class, format!("{}: {}", b.title, message)))
                }
            })
            .collect()
    }

    /// Exit code implied by the report: the highest class among failed
    /// blocks, or zero.
    pub fn exit_code(&self) -> u8 {
        self.errors()
            .iter()
            .map(|(class, _)| class.exit_code())
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> Json {
        let blocks: Vec<Json> = self
            .blocks
            .iter()
            .map(|b| {
                let mut fields = serde_json::Map::new();
                for (k, v) in &b.fields {
                    fields.insert(k.clone(), v.to_json());
                }
                let mut tables = serde_json::Map::new();
                for (label, t) in &b.tables {
                    let rows: Vec<Json> = t
                        .rows
                        .iter()
                        .map(|row| {
                            let mut obj = serde_json::Map::new();
                            for (col, cell) in t.columns.iter().zip(row) {
                                obj.insert(col.clone(), cell.to_json());
                            }
                            Json::Object(obj)
                        })
                        .collect();
                    tables.insert(label.clone(), json!(rows));
                }
                let mut matrices = serde_json::Map::new();
                for (label, m) in &b.matrices {
                    let rows: Vec<Json> = (0..m.dim())
                        .map(|i| {
                            json!((0..m.dim())
                                .map(|j| complex_json(m.get(i, j)))
                                .collect::<Vec<_>>())
                        })
                        .collect();
                    matrices.insert(label.clone(), json!(rows));
                }
                let status = match &b.status {
                    Status::Ok => json!({ "ok": true }),
                    Status::Error { class, message } => json!({
                        "ok": false,
                        "class": class.label(),
                        "exit_code": class.exit_code(),
                        "message": message,
                    }),
                };
                json!({
                    "title": b.title,
                    "status": status,
                    "fields": Json::Object(fields),
                    "tables": Json::Object(tables),
                    "matrices": Json::Object(matrices),
                    "warnings": b.warnings,
                })
            })
            .collect();
        let mut meta = serde_json::Map::new();
        for (k, v) in &self.meta {
            meta.insert(k.clone(), v.to_json());
        }
        json!({
            "command": self.command,
            "meta": Json::Object(meta),
            "blocks": blocks,
        })
    }

    pub fn to_text(&self, precision: usize) -> String {
        let mut out = String::new();
        out.push_str(&format!("qhist {}\n", self.command));
        for (k, v) in &self.meta {
            out.push_str(&format!("{}: {}\n", k, v.to_text(precision)));
        }
        for b in &self.blocks {
            let precision = b.precision.unwrap_or(precision);
            out.push_str(&format!("\n[{}]\n", b.title));
            if let Status::Error { class, message } = &b.status {
                out.push_str(&format!("  error ({}): {}\n", class.label(), message));
            }
            for w in &b.warnings {
                out.push_str(&format!("  warning: {w}\n"));
            }
            for (k, v) in &b.fields {
                out.push_str(&format!("  {}: {}\n", k, v.to_text(precision)));
            }
            for (label, t) in &b.tables {
                out.push_str(&format!("  {label}:\n"));
                out.push_str(&render_table(t, precision));
            }
            for (label, m) in &b.matrices {
                out.push_str(&format!("  {label}:\n"));
                for line in format!("{m:.precision$}").lines() {
                    out.push_str(&format!("    {line}\n"));
                }
            }
        }
        out
    }
}

fn render_table(t: &Table, precision: usize) -> String {
    let header: Vec<String> = t.columns.clone();
    let body: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|row| row.iter().map(|v| v.to_text(precision)).collect())
        .collect();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in &body {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: &[String], numeric: &[bool], widths: &[usize]| -> String {
        let mut line = String::from("    ");
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let pad = widths[i].saturating_sub(cell.chars().count());
            if numeric[i] {
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            } else {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            }
        }
        line.truncate(line.trim_end().len());
        line.push('\n');
        line
    };
    let numeric_cols: Vec<bool> = (0..t.columns.len())
        .map(|i| t.rows.iter().all(|r| r[i].is_numeric()))
        .collect();
    out.push_str(&fmt_row(&header, &vec![false; header.len()], &widths));
    for row in &body {
        out.push_str(&fmt_row(row, &numeric_cols, &widths));
    }
    out
}
