//! Versioned table output.
//!
//! CSV: `# key: value` header lines, a column row, data rows, and a final
//! `# summary: {json}` line. JSON: one object per line, header first, then
//! one object per row, then `{"summary": ...}`. Nothing in either depends on
//! wall time or on the worker count.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{Format, OutputArgs};
use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "stableprod-output/1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Cell {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Cell {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Cell {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Missing => Value::Null,
        }
    }
}

/// A finished experiment ready to be written.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub config: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
}

impl Table {
    pub fn new(
        command: &'static str,
        config: &impl Serialize,
        columns: Vec<&'static str>,
    ) -> Table {
        Table {
            command,
            config: serde_json::to_value(config).expect("config serializes"),
            columns,
            rows: Vec::new(),
            summary: Value::Object(Map::new()),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json_lines(),
        }
    }

    fn versions() -> Value {
        json!({
            "stableprod": stableprod::VERSION,
            "stableprod-cli": env!("CARGO_PKG_VERSION"),
        })
    }

    fn csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# schema: {SCHEMA}").unwrap();
        writeln!(s, "# command: {}", self.command).unwrap();
        writeln!(s, "# versions: {}", Self::versions()).unwrap();
        writeln!(s, "# config: {}", self.config).unwrap();
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        writeln!(s, "# summary: {}", self.summary).unwrap();
        s
    }

    fn json_lines(&self) -> String {
        let mut s = String::new();
        let header = json!({
            "schema": SCHEMA,
            "command": self.command,
            "versions": Self::versions(),
            "config": self.config,
            "columns": self.columns,
        });
        writeln!(s, "{header}").unwrap();
        for row in &self.rows {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| (c.to_string(), v.json()))
                .collect();
            writeln!(s, "{}", Value::Object(obj)).unwrap();
        }
        writeln!(s, "{}", json!({ "summary": self.summary })).unwrap();
        s
    }

    pub fn write(&self, out: &OutputArgs) -> CliResult<()> {
        let text = self.render(out.format);
        match &out.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
            None => std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}"))),
        }
    }
}
