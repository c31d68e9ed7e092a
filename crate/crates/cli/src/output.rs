//! CSV tables and JSON metadata sidecars.
//!
//! Numbers are written as the shortest decimal that parses back to the same
//! binary64 value, so exports round-trip exactly. Magnitudes outside
//! `[1e-5, 1e16)` use exponent form. Non-finite values appear as `NaN`, `inf`
//! or `-inf`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// One cell of a CSV row.
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => number(*x),
            Cell::I(n) => n.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::I(n as i64)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::I(n)
    }
}

impl From<i32> for Cell {
    fn from(n: i32) -> Self {
        Cell::I(n.into())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::S(b.to_string())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

/// Shortest round-trip decimal for `x`.
pub fn number(x: f64) -> String {
    let m = x.abs();
    if m == 0.0 || !m.is_finite() || (1e-5..1e16).contains(&m) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// A table waiting to be written, with its column header.
pub struct Table {
    pub name: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, header: &'static [&'static str]) -> Self {
        Self {
            name,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Collects the tables of one command and writes them with a sidecar.
pub struct Export<'a> {
    pub command: &'static str,
    pub config: &'a ExperimentConfig,
    pub tables: Vec<Table>,
    pub extra: BTreeMap<&'static str, Value>,
}

impl<'a> Export<'a> {
    pub fn new(command: &'static str, config: &'a ExperimentConfig) -> Self {
        Self {
            command,
            config,
            tables: Vec::new(),
            extra: BTreeMap::new(),
        }
    }

    /// Writes `<name>.csv` for every table and `<command>.json`; returns the paths.
    pub fn write(&self) -> Result<Vec<PathBuf>, CliError> {
        let dir = &self.config.out_dir;
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut paths = Vec::new();
        let mut files = BTreeMap::new();
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            write_csv(&path, t)?;
            files.insert(
                format!("{}.csv", t.name),
                json!({ "columns": t.header, "rows": t.rows.len() }),
            );
            paths.push(path);
        }
        let meta = json!({
            "command": self.command,
            "library": "spectral-interference",
            "version": spectral_interference::VERSION,
            "config": self.config.echo(),
            "files": files,
            "results": self.extra,
        });
        let path = dir.join(format!("{}.json", self.command));
        let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        paths.push(path);
        Ok(paths)
    }
}

fn write_csv(path: &Path, t: &Table) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(t.header).map_err(io)?;
    for row in &t.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for x in [
            0.1,
            1.0 / 3.0,
            1e-300,
            5e-324,
            1e300,
            2f64.sqrt(),
            -0.0,
            123456789.12345679,
        ] {
            let s = Cell::F(x).render();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(Cell::F(0.3).render(), "0.3");
        assert_eq!(number(8.671119018262734e-16), "8.671119018262734e-16");
        assert_eq!(number(f64::NAN), "NaN");
    }
}
