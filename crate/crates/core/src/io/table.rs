//! CSV tables with a `#` provenance header, written atomically.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{Result, SbtError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
}

impl Provenance {
    pub fn new(config_sha256: impl Into<String>) -> Self {
        Provenance { tool: "sbt-lab".into(), version: env!("CARGO_PKG_VERSION").into(), config_sha256: config_sha256.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl OutputTable {
    pub fn new(columns: &[&str], provenance: Provenance) -> Self {
        OutputTable { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), provenance }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(SbtError::input(format!("row has {} values for {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    /// The data section (column line and rows) without the header.
    pub fn body(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| SbtError::numerical(format!("csv encoding: {e}"));
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            // 17 significant digits round-trip every finite double
            w.write_record(r.iter().map(|v| format!("{v:.16e}"))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| SbtError::numerical(format!("csv encoding: {e}")))?;
        Ok(String::from_utf8(bytes).expect("ascii output"))
    }
}

fn persist(bytes: &[u8], path: &Path) -> Result<()> {
    let io = |source| SbtError::Io { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes `table` to `path` via a temporary file in the same directory and
/// a rename, so readers never see a partial file.
pub fn write_table(table: &OutputTable, path: &Path) -> Result<()> {
    let p = &table.provenance;
    let mut text = format!("# {} {}\n# config-sha256 {}\n", p.tool, p.version, p.config_sha256);
    text.push_str(&table.body()?);
    persist(text.as_bytes(), path)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| SbtError::numerical(format!("json encoding: {e}")))?;
    text.push('\n');
    persist(text.as_bytes(), path)
}

/// Reads a numeric CSV, skipping `#` lines. Returns column names and rows.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(|source| SbtError::Io { path: path.display().to_string(), source })?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let bad = |e: csv::Error| SbtError::input(format!("{}: {e}", path.display()));
    let columns: Vec<String> = r.headers().map_err(bad)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(bad)?;
        let row = rec
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| SbtError::input(format!("{} row {}: {e}", path.display(), i + 1)))?;
        rows.push(row);
    }
    Ok((columns, rows))
}
