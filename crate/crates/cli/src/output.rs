use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// One table cell. Floats are written with 12 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
}

impl Cell {
    fn csv(self) -> String {
        match self {
            Self::Num(x) => format_float(x),
            Self::Bool(b) => b.to_string(),
        }
    }

    fn json(self) -> Value {
        match self {
            Self::Num(x) if x.is_finite() => json!(round_to_format(x)),
            Self::Num(_) => Value::Null,
            Self::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Bool(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

fn round_to_format(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// `#`-prefixed metadata block shared by every output file.
pub fn header_lines(config: &RunConfig, title: &str) -> Vec<String> {
    vec![
        format!("# macrobell {}", macrobell_core::VERSION),
        format!("# {title}"),
        format!("# config-sha256: {}", config.sha256()),
        format!("# config: {}", config.canonical_json()),
    ]
}

pub fn render_csv(config: &RunConfig, table: &Table) -> String {
    let mut out = String::new();
    for line in header_lines(config, &format!("experiment: {}", config.experiment.name())) {
        writeln!(out, "{line}").unwrap();
    }
    writeln!(out, "{}", table.columns.join(",")).unwrap();
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|c| c.csv()).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'static str,
    config_sha256: String,
    config: &'a RunConfig,
    columns: &'a [&'static str],
    rows: Vec<Value>,
}

pub fn render_json(config: &RunConfig, table: &Table) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(|c| c.json()).collect()))
        .collect();
    let doc = JsonDocument {
        tool: "macrobell",
        version: macrobell_core::VERSION,
        experiment: config.experiment.name(),
        config_sha256: config.sha256(),
        config,
        columns: &table.columns,
        rows,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("output serializes");
    text.push('\n');
    text
}

pub fn render(config: &RunConfig, table: &Table, format: Format) -> String {
    match format {
        Format::Csv => render_csv(config, table),
        Format::Json => render_json(config, table),
    }
}

/// Plot-ready two-column CSV, rows sorted by `x`. No points gives the header alone.
pub fn emit_figure_data(config: &RunConfig, title: &str, x: &str, y: &str, points: &[(f64, f64)]) -> String {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out = String::new();
    for line in header_lines(config, title) {
        writeln!(out, "{line}").unwrap();
    }
    writeln!(out, "# x: {x}").unwrap();
    writeln!(out, "# y: {y}").unwrap();
    writeln!(out, "x,y").unwrap();
    for (px, py) in sorted {
        writeln!(out, "{},{}", format_float(px), format_float(py)).unwrap();
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
    }
    std::fs::write(path, contents).map_err(io)
}
