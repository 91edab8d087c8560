//! CSV and JSON serialization of experiment and bounds rows.
//!
//! Floats are written with 17 significant digits so a re-parse recovers the
//! exact bits. Integers that can exceed 64 bits are written in decimal.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use qelm_core::bounds::ResourceReport;

use crate::config::Format;
use crate::error::{CliError, CliResult};
use crate::runner::ResultRow;

pub const RESULT_HEADER: [&str; 15] = [
    "preset",
    "architecture",
    "n",
    "input_qubits",
    "reservoir_qubits",
    "pvm_outcomes",
    "target",
    "nmse_mean",
    "nmse_std",
    "n_runs",
    "n_samples",
    "master_seed",
    "wall_time_seconds",
    "variant",
    "extra",
];

pub const BOUNDS_HEADER: [&str; 9] = [
    "architecture",
    "input_qubits",
    "n",
    "min_reservoir_dim",
    "n_res",
    "n_unit",
    "n_res_tot",
    "n_tot",
    "pvm_outcomes",
];

/// A JSON or CSV cell.
enum Cell {
    Text(String),
    Int(String),
    Float(f64),
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) | Cell::Int(s) => s.clone(),
            Cell::Float(x) => format_float(*x),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Text(s) => serde_json::Value::String(s.clone()).to_string(),
            Cell::Int(s) => s.clone(),
            Cell::Float(x) if x.is_finite() => format_float(*x),
            Cell::Float(_) => "null".into(),
        }
    }
}

fn int(x: impl ToString) -> Cell {
    Cell::Int(x.to_string())
}

fn result_cells(r: &ResultRow) -> Vec<Cell> {
    vec![
        Cell::Text(r.preset.clone()),
        Cell::Text(r.architecture.clone()),
        int(r.n),
        int(r.input_qubits),
        int(r.reservoir_qubits),
        int(r.pvm_outcomes),
        Cell::Text(r.target.clone()),
        Cell::Float(r.nmse_mean),
        Cell::Float(r.nmse_std),
        int(r.n_runs),
        int(r.n_samples),
        int(r.master_seed),
        Cell::Float(r.wall_time_seconds),
        Cell::Text(r.variant.clone()),
        Cell::Text(r.extra.clone()),
    ]
}

fn bounds_cells(r: &ResourceReport) -> Vec<Cell> {
    vec![
        Cell::Text(r.kind.to_string()),
        int(r.input_qubits),
        int(r.n),
        int(&r.min_reservoir_dim),
        int(r.reservoir_qubits),
        int(r.unit_qubits),
        int(r.total_reservoir_qubits),
        int(r.total_qubits),
        int(&r.pvm_outcomes),
    ]
}

fn render_csv(header: &[&str], rows: &[Vec<Cell>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::io("<csv buffer>", e.into());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io("<csv buffer>", e.into_error()))
}

fn render_json(header: &[&str], rows: &[Vec<Cell>]) -> Vec<u8> {
    let mut out = String::from("[");
    for (i, row) in rows.iter().enumerate() {
        out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
        for (j, (key, cell)) in header.iter().zip(row).enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "\"{key}\": {}", cell.json());
        }
        out.push('}');
    }
    out.push_str(if rows.is_empty() { "]\n" } else { "\n]\n" });
    out.into_bytes()
}

fn render(header: &[&str], rows: &[Vec<Cell>], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Csv => render_csv(header, rows),
        Format::Json => Ok(render_json(header, rows)),
    }
}

pub fn render_results(rows: &[ResultRow], format: Format) -> CliResult<Vec<u8>> {
    render(
        &RESULT_HEADER,
        &rows.iter().map(result_cells).collect::<Vec<_>>(),
        format,
    )
}

pub fn render_bounds(rows: &[ResourceReport], format: Format) -> CliResult<Vec<u8>> {
    render(
        &BOUNDS_HEADER,
        &rows.iter().map(bounds_cells).collect::<Vec<_>>(),
        format,
    )
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn write_output(bytes: &[u8], path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

pub fn emit(rows: &[ResultRow], format: Format, path: Option<&Path>) -> CliResult<()> {
    write_output(&render_results(rows, format)?, path)
}
