//! Artifact writing: CSV tables, JSON summaries and the config hash.
//!
//! Every artifact is written to a temporary sibling and renamed into place,
//! so a file is either complete or absent.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Canonical `key=value` listing of every setting that affects results.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Canonical(BTreeMap<String, String>);

impl Canonical {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn set_f64(&mut self, key: &str, value: f64) {
        self.set(key, fmt_f64(value));
    }

    pub fn text(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Hex SHA-256 of [`Canonical::text`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.text().as_bytes()))
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn header_line(hash: &str) -> String {
    format!("# mirrorlang {VERSION} config_hash={hash}")
}

/// A numeric table rendered as CSV below the metadata line.
#[derive(Debug, Clone)]
pub struct CsvTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, hash: &str) -> String {
        let mut out = String::with_capacity(32 * self.rows.len() * self.columns.len());
        out.push_str(&header_line(hash));
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:?}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let name = path.file_name().ok_or_else(|| {
        std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "output path has no file name",
        )
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn write_csv(path: &Path, table: &CsvTable, hash: &str) -> std::io::Result<()> {
    write_atomic(path, table.render(hash).as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// One acceptance target evaluated by a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &str, value: f64, target: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            value,
            target,
            tolerance,
            pass,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Passes when |value/target − 1| ≤ tolerance.
    pub fn relative(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        let pass = ((value / target) - 1.0).abs() <= tolerance;
        Self::new(name, value, target, tolerance, pass)
    }
}

/// Deterministic part of every run's record.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub config_hash: String,
    pub master_seed: Option<u64>,
    pub tolerance_version: u32,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub results: serde_json::Value,
    pub artifacts: Vec<String>,
}

/// Wall-clock record kept apart from the summary so that summaries stay
/// byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub config_hash: String,
    pub wall_time_s: f64,
}

/// Sidecar path `<stem>.timing.json` next to `summary`.
pub fn timing_path(summary: &Path) -> PathBuf {
    let stem = summary
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    summary.with_file_name(format!("{stem}.timing.json"))
}
