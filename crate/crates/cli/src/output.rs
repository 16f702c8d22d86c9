//! Tables, number formatting and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::CliError;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// A table whose numeric headers carry a bracketed unit, e.g. `z[m]`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.headers.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(x) => format_g(*x),
                    Cell::Text(t) => t.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (h, c) in self.headers.iter().zip(row) {
                        let v = match c {
                            Cell::Int(i) => json!(i),
                            Cell::Num(x) => number(*x),
                            Cell::Text(t) => json!(t),
                            Cell::Empty => Value::Null,
                        };
                        m.insert(h.clone(), v);
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

/// JSON number, with non-finite values as strings rather than null.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format_g(x))
    }
}

/// `%.12g`: twelve significant digits, trailing zeros dropped.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// What a subcommand produces: an optional table plus summary fields.
#[derive(Debug, Default)]
pub struct Output {
    pub table: Option<Table>,
    pub summary: Map<String, Value>,
}

impl Output {
    pub fn note(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }
}

pub fn manifest(command: &str, inputs: Value, seed: Option<u64>, summary: &Map<String, Value>) -> Value {
    json!({
        "tool": "iontrap",
        "cli_version": env!("CARGO_PKG_VERSION"),
        "library_version": iontrap::VERSION,
        "command": command,
        "inputs": inputs,
        "seed": seed,
        "summary": summary,
    })
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// CSV: table to stdout or `--out`, manifest to the sidecar file or stderr.
/// JSON: one document holding manifest and rows.
pub fn emit(out: &Output, manifest: Value, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let (data, side) = match format {
        Format::Csv => {
            let table = out.table.as_ref().map(Table::to_csv).unwrap_or_default();
            let side = serde_json::to_string_pretty(&manifest).expect("serialisable manifest") + "\n";
            (table, Some(side))
        }
        Format::Json => {
            let rows = out.table.as_ref().map_or(Value::Null, Table::to_json);
            let doc = json!({ "manifest": manifest, "rows": rows });
            (serde_json::to_string_pretty(&doc).expect("serialisable output") + "\n", None)
        }
    };
    match path {
        Some(p) => {
            write_file(p, &data)?;
            if let Some(side) = side {
                write_file(&sidecar(p), &side)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(data.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))?;
            if let Some(side) = side {
                eprint!("{side}");
            }
        }
    }
    Ok(())
}
