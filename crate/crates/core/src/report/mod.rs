//! Report assembly for the command-line front end: a JSON document per run
//! and a CSV trace whose bytes depend only on the configuration.

pub mod cli;
pub mod commands;
pub mod suite;

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::config::manifold_from_str;
use crate::geometry::{load_manifold, ChartManifold};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const BUILTINS: &[(&str, &str)] = &[
    ("hyperbolic2", include_str!("../../data/hyperbolic2.json")),
    ("hyperbolic3", include_str!("../../data/hyperbolic3.json")),
    ("euclidean", include_str!("../../data/euclidean.json")),
    ("sphere2", include_str!("../../data/sphere2.json")),
    ("perturbed2", include_str!("../../data/perturbed2.json")),
    ("disk", include_str!("../../data/disk.json")),
    ("line", include_str!("../../data/line.json")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

/// One of the bundled manifold definitions (the files under `data/`).
pub fn builtin_manifold(name: &str) -> Result<ChartManifold> {
    let (_, text) = BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("no builtin manifold `{name}` (known: {})", builtin_names().join(", "))))?;
    manifold_from_str(text, name)
}

/// A path to a manifold file, or the name of a bundled one.
pub fn resolve_manifold(spec: &str) -> Result<ChartManifold> {
    let path = Path::new(spec);
    if path.exists() {
        return load_manifold(path);
    }
    let stem = spec.trim_end_matches(".json");
    let stem = Path::new(stem).file_name().and_then(|s| s.to_str()).unwrap_or(stem);
    match builtin_manifold(stem) {
        Ok(m) => Ok(m),
        Err(_) => Err(Error::Io(format!("{spec}: no such file or builtin manifold"))),
    }
}

/// Fixed formatting for CSV numbers: shortest round-trip representation.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TraceTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TraceTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "REJECTED")]
    Rejected,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub subcommand: String,
    pub version: String,
    pub config: Value,
    pub verdict: Verdict,
    pub summary: String,
    pub rows: usize,
    pub details: Value,
    #[serde(skip)]
    pub trace: TraceTable,
}

impl Report {
    pub fn new(subcommand: &str, config: &impl Serialize, verdict: Verdict, summary: String, details: Value, trace: TraceTable) -> Self {
        Self {
            subcommand: subcommand.into(),
            version: VERSION.into(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            verdict,
            summary,
            rows: trace.rows.len(),
            details,
            trace,
        }
    }

    pub fn pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Writes `report.json` and `trace.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(dir.join("report.json"), json + "\n").map_err(io)?;
        fs::write(dir.join("trace.csv"), self.trace.to_csv_string()?).map_err(io)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for name in builtin_names() {
            builtin_manifold(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(resolve_manifold("hyperbolic2.json").is_ok());
        assert!(resolve_manifold("missing.json").is_err());
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = TraceTable::new(&["a", "b"]);
        t.push(vec!["1".into(), "x, y".into()]);
        assert_eq!(t.to_csv_string().unwrap(), "a,b\n1,\"x, y\"\n");
    }
}
