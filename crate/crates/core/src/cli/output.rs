//! CSV tables and JSON sidecars.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) if x.is_nan() => "NaN".into(),
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

/// Header plus rows; rows are written in the order given.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        let mut w = csv::Writer::from_path(path).map_err(|e| io(e.into()))?;
        w.write_record(&self.header).map_err(|e| io(e.into()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(|e| io(e.into()))?;
        }
        w.flush().map_err(io)
    }
}

/// Metadata written next to every CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub artifact: String,
    pub version: &'static str,
    pub config: serde_json::Value,
    pub summary: serde_json::Value,
}

impl Sidecar {
    pub fn new(artifact: &str, config: serde_json::Value, summary: serde_json::Value) -> Self {
        Self {
            artifact: artifact.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            config,
            summary,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("plain data");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

/// `out.csv` gets `out.json`; a `.json` output gets `out.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let p = csv.with_extension("json");
    if p == csv {
        csv.with_extension("meta.json")
    } else {
        p
    }
}

/// Files produced by one run.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub csv: PathBuf,
    pub sidecar: PathBuf,
    pub table: Table,
    pub summary: serde_json::Value,
}

pub fn write_artifact(
    name: &str,
    csv: &Path,
    table: Table,
    config: serde_json::Value,
    summary: serde_json::Value,
) -> Result<Artifact, CliError> {
    table.write_csv(csv)?;
    let sidecar = sidecar_path(csv);
    Sidecar::new(name, config, summary.clone()).write(&sidecar)?;
    Ok(Artifact {
        csv: csv.to_path_buf(),
        sidecar,
        table,
        summary,
    })
}
