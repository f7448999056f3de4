//! Experiment reports and their JSON / CSV renderings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub holds: bool,
    pub measured: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            holds,
            measured: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn measure(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<CheckResult>,
    /// Left out unless asked for, so that equal configs give equal bytes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl ExperimentReport {
    pub fn new(config: BTreeMap<String, String>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            checks: Vec::new(),
            wall_time_seconds: None,
        }
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// JSON with sorted keys (serde_json's default map is ordered).
pub fn to_json(report: &ExperimentReport) -> Result<String> {
    let value = serde_json::to_value(report).map_err(json_error)?;
    let mut s = serde_json::to_string_pretty(&value).map_err(json_error)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<ExperimentReport> {
    serde_json::from_str(text).map_err(json_error)
}

/// One row per check: `name, holds, measured, notes`, with measured values
/// as `key=value` pairs joined by `;`.
pub fn to_csv(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io {
        path: "<memory>".into(),
        message: e.to_string(),
    };
    w.write_record(["name", "holds", "measured", "notes"])
        .map_err(io)?;
    for c in &report.checks {
        let measured: Vec<String> = c.measured.iter().map(|(k, v)| format!("{k}={v}")).collect();
        w.write_record([
            c.name.as_str(),
            if c.holds { "true" } else { "false" },
            &measured.join(";"),
            &c.notes.join("; "),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<memory>".into(),
        message: e.to_string(),
    })?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn render(report: &ExperimentReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => to_csv(report),
    }
}

/// Renders the report and writes it to `path`, or returns the text when no
/// path is given.
pub fn emit_report(
    report: &ExperimentReport,
    format: OutputFormat,
    path: Option<&Path>,
) -> Result<String> {
    let text = render(report, format)?;
    if let Some(p) = path {
        std::fs::write(p, &text).map_err(|e| Error::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r =
            ExperimentReport::new([("k".to_string(), "2".to_string())].into_iter().collect());
        r.checks.push(
            CheckResult::new("a, with comma", true)
                .measure("x", 0.1)
                .measure("y", 1e-300),
        );
        r.checks
            .push(CheckResult::new("b", false).note("said \"no\""));
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let text = to_json(&r).unwrap();
        assert_eq!(from_json(&text).unwrap(), r);
        assert!(!text.contains("wall_time"));
        let empty = ExperimentReport::new(BTreeMap::new());
        let v: serde_json::Value = serde_json::from_str(&to_json(&empty).unwrap()).unwrap();
        assert!(v["checks"].as_array().unwrap().is_empty());
    }

    #[test]
    fn json_keys_sorted() {
        let text = to_json(&sample()).unwrap();
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("checks") < pos("config") && pos("config") < pos("version"));
    }

    #[test]
    fn csv_rows() {
        let text = to_csv(&sample()).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(&rows[0][0], "a, with comma");
        assert_eq!(&rows[1][3], "said \"no\"");
    }

    #[test]
    fn write_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        emit_report(&sample(), OutputFormat::Json, Some(&path)).unwrap();
        assert_eq!(
            from_json(&std::fs::read_to_string(&path).unwrap()).unwrap(),
            sample()
        );
        let bad = dir.path().join("missing").join("r.json");
        assert!(matches!(
            emit_report(&sample(), OutputFormat::Json, Some(&bad)),
            Err(Error::Io { .. })
        ));
    }
}
