//! CSV and JSON-lines record writer.

use std::io::{self, Write};

use fubini_core::exactnum::{format_rational, to_f64};
use fubini_core::Rational;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(u64),
    Text(String),
    Exact(Rational),
    Float(f64),
    Bool(bool),
    Map(Vec<(String, String)>),
    Null,
}

/// One output row: ordered `(column, value)` pairs.
pub type Record = Vec<(&'static str, Cell)>;

/// Shortest round-trip decimal; integral values print without a fraction and
/// very small or large magnitudes use exponent notation.
pub fn float_text(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e16) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn csv_quote(s: String) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn float_json(v: f64) -> Value {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 9.007_199_254_740_992e15 {
        Value::Number(Number::from(v as i64))
    } else {
        Number::from_f64(v).map_or_else(|| Value::String(float_text(v)), Value::Number)
    }
}

pub struct Writer<W: Write> {
    out: W,
    format: Format,
    float: bool,
    header_written: bool,
}

impl<W: Write> Writer<W> {
    pub fn new(out: W, format: Format, float: bool) -> Self {
        Self {
            out,
            format,
            float,
            header_written: false,
        }
    }

    fn csv_cell(&self, cell: &Cell) -> String {
        match cell {
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Exact(q) if self.float => float_text(to_f64(q)),
            Cell::Exact(q) => format_rational(q),
            Cell::Float(v) => float_text(*v),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
            Cell::Map(kv) => kv
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }

    fn json_cell(&self, cell: &Cell) -> Value {
        match cell {
            Cell::Int(v) => Value::Number((*v).into()),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Exact(q) if self.float => float_json(to_f64(q)),
            Cell::Exact(q) => Value::String(format_rational(q)),
            Cell::Float(v) => float_json(*v),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Null => Value::Null,
            Cell::Map(kv) => Value::Object(
                kv.iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect::<Map<_, _>>(),
            ),
        }
    }

    pub fn write(&mut self, record: &Record) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                if !self.header_written {
                    let header: Vec<&str> = record.iter().map(|(k, _)| *k).collect();
                    writeln!(self.out, "{}", header.join(","))?;
                    self.header_written = true;
                }
                let cells: Vec<String> = record
                    .iter()
                    .map(|(_, c)| csv_quote(self.csv_cell(c)))
                    .collect();
                writeln!(self.out, "{}", cells.join(","))
            }
            Format::Jsonl => {
                let obj: Map<String, Value> = record
                    .iter()
                    .map(|(k, c)| (k.to_string(), self.json_cell(c)))
                    .collect();
                writeln!(self.out, "{}", Value::Object(obj))
            }
        }
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}
