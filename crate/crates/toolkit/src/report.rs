//! The verification report written by every subcommand.

use std::fs;
use std::path::Path;

use newton_circle_core::report::Check;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::Error;

/// One check as serialized: `pass` holds exactly when the recorded comparison does.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
}

fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else if x == f64::NEG_INFINITY {
        f64::MIN
    } else {
        f64::MAX
    }
}

impl From<&Check> for CheckRecord {
    /// Non-finite sides are clamped to the largest double; such checks already fail.
    fn from(c: &Check) -> Self {
        let clean = c.lhs.is_finite() && c.rhs.is_finite() && c.tolerance.is_finite();
        CheckRecord {
            name: c.name.clone(),
            pass: c.passed && clean,
            lhs: finite(c.lhs),
            rhs: finite(c.rhs),
            tolerance: finite(c.tolerance),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub params: Map<String, Value>,
    pub results: Vec<Map<String, Value>>,
    pub checks: Vec<CheckRecord>,
    pub runtime_ms: u64,
    pub version: String,
}

impl VerificationReport {
    pub fn new(command: impl Into<String>) -> Self {
        VerificationReport {
            command: command.into(),
            params: Map::new(),
            results: Vec::new(),
            checks: Vec::new(),
            runtime_ms: 0,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn result(&mut self, row: Map<String, Value>) -> &mut Self {
        self.results.push(row);
        self
    }

    pub fn check(&mut self, check: &Check) -> &mut Self {
        self.checks.push(check.into());
        self
    }

    pub fn checks<'a>(&mut self, checks: impl IntoIterator<Item = &'a Check>) -> &mut Self {
        for c in checks {
            self.check(c);
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `0` when every check passes, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only finite numbers");
        s.push('\n');
        s
    }

    /// One row per check.
    pub fn checks_csv(&self) -> Result<String, Error> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(["name", "pass", "lhs", "rhs", "tolerance"])?;
        for c in &self.checks {
            w.serialize(c)?;
        }
        finish(w)
    }

    /// One row per result record; columns are the keys in order of first appearance.
    pub fn results_csv(&self) -> Result<String, Error> {
        let mut columns: Vec<&str> = Vec::new();
        for row in &self.results {
            for k in row.keys() {
                if !columns.contains(&k.as_str()) {
                    columns.push(k);
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        if !columns.is_empty() {
            w.write_record(&columns)?;
        }
        for row in &self.results {
            w.write_record(columns.iter().map(|k| row.get(*k).map(cell).unwrap_or_default()))?;
        }
        finish(w)
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, Error> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub fn emit_report(report: &VerificationReport, format: Format, path: &Path) -> Result<(), Error> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.checks_csv()?,
    };
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order_and_empty_checks() {
        let r = VerificationReport::new("newton");
        let json = r.to_json();
        let keys: Vec<usize> =
            ["\"command\"", "\"params\"", "\"results\"", "\"checks\"", "\"runtime_ms\"", "\"version\""].iter().map(|k| json.find(k).unwrap()).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(json.contains("\"checks\": []"));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn failing_and_non_finite_checks() {
        let mut r = VerificationReport::new("x");
        r.check(&Check::le("bad", f64::NAN, 1.0, 0.0));
        assert_eq!(r.checks[0].lhs, f64::MAX);
        assert!(!r.checks[0].pass);
        assert_eq!(r.exit_code(), 1);
        assert!(r.to_json().contains("\"pass\": false"));
    }

    #[test]
    fn csv_layouts() {
        let mut r = VerificationReport::new("gauss");
        r.check(&Check::le("a,b", 0.5, 1.0, 0.0));
        let mut row = Map::new();
        row.insert("q".into(), 3.into());
        row.insert("note".into(), "x".into());
        r.result(row);
        let mut row = Map::new();
        row.insert("q".into(), 4.into());
        r.result(row);
        assert_eq!(r.checks_csv().unwrap(), "name,pass,lhs,rhs,tolerance\n\"a,b\",true,0.5,1.0,0.0\n");
        assert_eq!(r.results_csv().unwrap(), "q,note\n3,x\n4,\n");
    }
}
