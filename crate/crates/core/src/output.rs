//! Fixed-format CSV and JSON emission.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits in scientific notation; round-trips through `f64::from_str`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Minimal CSV writer: header row, `.` decimal separator, no quoting needed.
pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out, columns: header.len() })
    }

    pub fn row(&mut self, cells: &[Cell]) -> Result<()> {
        debug_assert_eq!(cells.len(), self.columns);
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        writeln!(self.out, "{}", line.join(","))?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// A CSV cell: floats get the fixed 17-digit format.
#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format_f64(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

/// Wraps a payload as `{"schema_version": .., "kind": .., "result": ..}`.
pub fn json_document<T: Serialize>(kind: &str, result: &T) -> Result<String> {
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}
