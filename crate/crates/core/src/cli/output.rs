//! Deterministic output records.
//!
//! Keys are emitted in insertion order, which each runner fixes. Every float
//! is printed with 17 significant digits (`{:.16e}`).

use std::fmt::Write as _;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::Int(i as i64)
    }
}

impl From<u64> for Value {
    fn from(i: u64) -> Self {
        Value::Int(i as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

impl Value {
    fn to_json(&self) -> String {
        match self {
            Value::Num(x) if x.is_finite() => format_float(*x),
            Value::Num(_) => "null".into(),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => json_string(s),
        }
    }

    fn to_text(&self) -> String {
        match self {
            Value::Num(x) => format_float(*x),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Value::Text(s) => csv_field(s),
            other => other.to_text(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub value: Value,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub inputs: Vec<(String, Value)>,
    pub results: Vec<(String, Quantity)>,
    pub warnings: Vec<String>,
    pub table: Option<Table>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            inputs: Vec::new(),
            results: Vec::new(),
            warnings: Vec::new(),
            table: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        let value = value.into();
        match self.inputs.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.inputs.push((key.to_string(), value)),
        }
        self
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>, unit: &str) -> &mut Self {
        self.results.push((
            key.to_string(),
            Quantity {
                value: value.into(),
                unit: unit.to_string(),
            },
        ));
        self
    }

    pub fn warn(&mut self, msg: impl Into<String>) -> &mut Self {
        let msg = msg.into();
        if !self.warnings.contains(&msg) {
            self.warnings.push(msg);
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&Quantity> {
        self.results.iter().find(|(k, _)| k == key).map(|(_, q)| q)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(|q| q.value.as_f64())
    }

    pub fn to_json(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{{\"schema_version\":{},\"command\":{},\"inputs\":{{",
            json_string(&self.schema_version),
            json_string(&self.command)
        )
        .unwrap();
        for (i, (k, v)) in self.inputs.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write!(s, "{}:{}", json_string(k), v.to_json()).unwrap();
        }
        s.push_str("},\"results\":{");
        for (i, (k, q)) in self.results.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write!(
                s,
                "{}:{{\"value\":{},\"unit\":{}}}",
                json_string(k),
                q.value.to_json(),
                json_string(&q.unit)
            )
            .unwrap();
        }
        s.push_str("},\"warnings\":[");
        for (i, w) in self.warnings.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&json_string(w));
        }
        s.push(']');
        if let Some(t) = &self.table {
            s.push_str(",\"table\":{\"columns\":[");
            for (i, (name, unit)) in t.columns.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                write!(s, "{{\"name\":{},\"unit\":{}}}", json_string(name), json_string(unit)).unwrap();
            }
            s.push_str("],\"rows\":[");
            for (i, row) in t.rows.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push('[');
                let cells: Vec<String> = row.iter().map(|&x| Value::Num(x).to_json()).collect();
                s.push_str(&cells.join(","));
                s.push(']');
            }
            s.push_str("]}");
        }
        s.push('}');
        s
    }

    /// `section,name,value,unit` lines; a table, if any, follows after a
    /// blank line with its own header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("section,name,value,unit\n");
        s.push_str(&format!("meta,schema_version,{},\n", csv_field(&self.schema_version)));
        s.push_str(&format!("meta,command,{},\n", csv_field(&self.command)));
        for (k, v) in &self.inputs {
            s.push_str(&format!("input,{},{},\n", csv_field(k), v.to_csv()));
        }
        for (k, q) in &self.results {
            s.push_str(&format!("result,{},{},{}\n", csv_field(k), q.value.to_csv(), csv_field(&q.unit)));
        }
        for (i, w) in self.warnings.iter().enumerate() {
            s.push_str(&format!("warning,{i},{},\n", csv_field(w)));
        }
        if let Some(t) = &self.table {
            s.push('\n');
            s.push_str(&table_csv(t));
        }
        s
    }

    pub fn to_table(&self) -> String {
        let width = self
            .inputs
            .iter()
            .map(|(k, _)| k.len())
            .chain(self.results.iter().map(|(k, _)| k.len()))
            .max()
            .unwrap_or(0);
        let mut s = format!("{} (schema {})\n", self.command, self.schema_version);
        s.push_str("inputs:\n");
        for (k, v) in &self.inputs {
            s.push_str(&format!("  {k:<width$}  {}\n", v.to_text()));
        }
        s.push_str("results:\n");
        for (k, q) in &self.results {
            let value = q.value.to_text();
            if q.unit.is_empty() {
                s.push_str(&format!("  {k:<width$}  {value}\n"));
            } else {
                s.push_str(&format!("  {k:<width$}  {value:<24}  {}\n", q.unit));
            }
        }
        if !self.warnings.is_empty() {
            s.push_str("warnings:\n");
            for w in &self.warnings {
                s.push_str(&format!("  - {w}\n"));
            }
        }
        if let Some(t) = &self.table {
            s.push_str("table:\n");
            let header: Vec<String> = t.columns.iter().map(|(n, u)| format!("{:>24}", format!("{n} [{u}]"))).collect();
            s.push_str(&format!("  {}\n", header.join(" ")));
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(|&x| format!("{:>24}", format_float(x))).collect();
                s.push_str(&format!("  {}\n", cells.join(" ")));
            }
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = self.to_json();
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Table => self.to_table(),
        }
    }
}

fn table_csv(t: &Table) -> String {
    let mut s = String::new();
    let header: Vec<String> = t.columns.iter().map(|(n, _)| csv_field(n)).collect();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Renders sweep rows: JSON-lines, or one CSV/table row per point keyed by
/// the first record's result names.
pub fn render_sweep(var: &str, values: &[f64], records: &[OutputRecord], format: Format) -> String {
    match format {
        Format::Json => records
            .iter()
            .map(|r| {
                let mut line = r.to_json();
                line.push('\n');
                line
            })
            .collect(),
        Format::Csv | Format::Table => {
            let keys: Vec<&str> = records
                .first()
                .map(|r| r.results.iter().map(|(k, _)| k.as_str()).collect())
                .unwrap_or_default();
            let mut header = vec![format!("sweep.{var}")];
            header.extend(keys.iter().map(|k| k.to_string()));
            header.push("warnings".into());
            let mut rows = Vec::with_capacity(records.len());
            for (x, r) in values.iter().zip(records) {
                let mut cells = vec![format_float(*x)];
                for k in &keys {
                    cells.push(r.get(k).map(|q| q.value.to_csv()).unwrap_or_default());
                }
                cells.push(csv_field(&r.warnings.join("; ")));
                rows.push(cells);
            }
            if format == Format::Csv {
                let mut s = header.join(",");
                s.push('\n');
                for row in rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            } else {
                let mut s = String::new();
                let n = header.len() - 1;
                let line = |cells: &[String]| {
                    let mut out: Vec<String> = cells[..n].iter().map(|c| format!("{c:>24}")).collect();
                    out.push(cells[n].clone());
                    out.join(" ")
                };
                s.push_str(&line(&header));
                s.push('\n');
                for row in &rows {
                    s.push_str(&line(row));
                    s.push('\n');
                }
                s
            }
        }
    }
}
