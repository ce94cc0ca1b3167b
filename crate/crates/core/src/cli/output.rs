//! Deterministic CSV/JSON rendering and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Number, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Fixed float format for every emitted number.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a header row and LF line endings.
#[derive(Debug, Clone)]
pub struct Table {
    out: String,
    columns: usize,
}

pub enum Cell {
    Float(f64),
    Bool(bool),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let head: Vec<&str> = header.iter().map(AsRef::as_ref).collect();
        Table {
            out: format!("{}\n", head.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns);
        let text: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Float(x) => float(x),
                Cell::Bool(b) => b.to_string(),
                Cell::Text(t) => t.to_string(),
            })
            .collect();
        let _ = writeln!(self.out, "{}", text.join(","));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

fn canonical(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            Value::Number(Number::from_str(&float(x)).expect("formatted float is valid JSON"))
        }
        Value::Array(v) => Value::Array(v.into_iter().map(canonical).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float in the fixed format.
pub fn json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut s = serde_json::to_string_pretty(&canonical(v)).expect("value serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// RFC 3339, UTC; taken from `SOURCE_DATE_EPOCH` when set.
    pub created: String,
    pub powers_w: Vec<f64>,
    /// Canonical config text the run used.
    pub config: String,
    pub files: Vec<FileRecord>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|t| chrono::DateTime::from_timestamp(t, 0));
    fixed
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `artifacts` into `dir` followed by a manifest listing their digests.
pub fn write_run(
    dir: &Path,
    command: &'static str,
    config: String,
    powers_w: Vec<f64>,
    artifacts: &[(String, String)],
) -> Result<RunManifest> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let mut files = Vec::with_capacity(artifacts.len());
    for (name, body) in artifacts {
        let path: PathBuf = dir.join(name);
        fs::write(&path, body).map_err(io_error(&path))?;
        files.push(FileRecord {
            path: name.clone(),
            bytes: body.len(),
            sha256: hex::encode(Sha256::digest(body.as_bytes())),
        });
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        created: timestamp(),
        powers_w,
        config,
        files,
    };
    let path = dir.join(MANIFEST_NAME);
    fs::write(&path, json(&manifest)).map_err(io_error(&path))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_fixed_form() {
        assert_eq!(float(2.0), "2.0000000000000000e0");
        assert_eq!(float(-0.125), "-1.2500000000000000e-1");
        assert_eq!(float(-1.5e-7), "-1.4999999999999999e-7");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn json_rewrites_floats_only() {
        #[derive(Serialize)]
        struct S {
            n: usize,
            x: f64,
            v: Vec<f64>,
        }
        let s = json(&S { n: 3, x: 0.5, v: vec![1.0, 1e300] });
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("\"x\": 5.0000000000000000e-1"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["v"][1].as_f64().unwrap(), 1e300);
        assert!(!s.contains('\r'));
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.row(vec![1.0.into(), true.into()]);
        assert_eq!(t.finish(), "a,b\n1.0000000000000000e0,true\n");
    }
}
