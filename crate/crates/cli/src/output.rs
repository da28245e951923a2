//! CSV tables and JSON manifests.

use crate::config::Config;
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

/// Written in place of a time that the envelope never reaches inside the
/// noise-validity window.
pub const SENTINEL_EXCEEDS: &str = "exceeds_window";
/// Written where the model could not be evaluated.
pub const SENTINEL_FAILED: &str = "failed";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Sentinel(&'static str),
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                match c {
                    Cell::Num(x) => write!(s, "{x:e}").unwrap(),
                    Cell::Text(t) => s.push_str(t),
                    Cell::Sentinel(t) => s.push_str(t),
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Write via a temporary file and rename, so readers never see a partial
/// file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

pub fn cutoffs(cfg: &Config) -> Value {
    let tau = std::f64::consts::TAU;
    json!({
        "omega_l_hz": cfg.noise.omega_l_hz,
        "omega_h_hz": cfg.noise.omega_h_hz,
        "omega_l_rad_per_s": tau * cfg.noise.omega_l_hz,
        "omega_h_rad_per_s": tau * cfg.noise.omega_h_hz,
        "validity_window_s": [1.0 / (tau * cfg.noise.omega_h_hz), 1.0 / (tau * cfg.noise.omega_l_hz)],
    })
}

/// Sidecar describing one or more CSV files.
pub struct Manifest {
    pub command: &'static str,
    pub files: Vec<(String, Vec<String>, usize)>,
    pub extra: Map<String, Value>,
}

impl Manifest {
    pub fn new(command: &'static str) -> Self {
        Self { command, files: Vec::new(), extra: Map::new() }
    }

    pub fn file(&mut self, name: &str, table: &Table) {
        self.files.push((name.to_string(), table.columns.clone(), table.rows.len()));
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.extra.insert(key.to_string(), v);
    }

    pub fn to_json(&self, cfg: &Config) -> Value {
        let files: Vec<Value> = self
            .files
            .iter()
            .map(|(n, c, r)| json!({"name": n, "columns": c, "rows": r}))
            .collect();
        json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "files": files,
            "sentinels": {
                SENTINEL_EXCEEDS: "envelope stays above threshold inside the noise validity window",
                SENTINEL_FAILED: "model evaluation failed for this cell",
            },
            "cutoffs": cutoffs(cfg),
            "config": cfg,
            "results": Value::Object(self.extra.clone()),
        })
    }
}

/// Writes `<stem>.csv` for each table and `<manifest_stem>.json`.
pub fn emit(out: &Path, cfg: &Config, manifest_stem: &str, mut manifest: Manifest, tables: &[(&str, &Table)]) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    for (stem, table) in tables {
        let name = format!("{stem}.csv");
        manifest.file(&name, table);
        let p = out.join(&name);
        write_atomic(&p, &table.to_csv())?;
        written.push(p);
    }
    let p = out.join(format!("{manifest_stem}.json"));
    let mut text = serde_json::to_string_pretty(&manifest.to_json(cfg)).map_err(io::Error::other)?;
    text.push('\n');
    write_atomic(&p, &text)?;
    written.push(p);
    Ok(written)
}
