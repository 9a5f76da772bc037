//! Verification reports: the output unit of every check.

use crate::numeric::Num;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

/// One probe (or one step) of a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub probe_id: String,
    pub values: BTreeMap<String, Num>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ProbeRecord {
    pub fn new(probe_id: impl Into<String>, passed: bool) -> Self {
        ProbeRecord { probe_id: probe_id.into(), values: BTreeMap::new(), passed, note: None }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), Num(value));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).map(|n| n.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub check: String,
    /// False for informational checks whose outcome does not affect the exit status.
    pub asserted: bool,
    pub passed: bool,
    pub records: Vec<ProbeRecord>,
    pub aggregates: BTreeMap<String, Num>,
    pub notes: Vec<String>,
    pub config: serde_json::Value,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            check: check.into(),
            asserted: true,
            passed: true,
            records: Vec::new(),
            aggregates: BTreeMap::new(),
            notes: Vec::new(),
            config: serde_json::Value::Null,
        }
    }

    pub fn push(&mut self, record: ProbeRecord) {
        self.records.push(record);
    }

    pub fn aggregate(&mut self, key: &str, value: f64) {
        self.aggregates.insert(key.to_string(), Num(value));
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.aggregates.get(key).map(|n| n.0)
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Sets `passed` from the records and any extra conditions.
    pub fn finish(&mut self, extra: bool) {
        self.passed = extra && self.records.iter().all(|r| r.passed);
    }

    pub fn failed_records(&self) -> impl Iterator<Item = &ProbeRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    /// Counts as a failure only when asserted.
    pub fn ok(&self) -> bool {
        self.passed || !self.asserted
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let status = match (self.asserted, self.passed) {
            (false, _) => "INFO",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        let _ = writeln!(out, "== {} [{}]", self.check, status);
        for (k, v) in &self.aggregates {
            let _ = writeln!(out, "   {:<28} {}", k, fmt_num(v.0));
        }
        for n in &self.notes {
            let _ = writeln!(out, "   note: {n}");
        }
        let mut keys: Vec<&String> = Vec::new();
        for r in &self.records {
            for k in r.values.keys() {
                if !keys.contains(&k) {
                    keys.push(k);
                }
            }
        }
        if self.records.is_empty() {
            return out;
        }
        let id_w = self.records.iter().map(|r| r.probe_id.len()).max().unwrap_or(5).max(5);
        let col_w: Vec<usize> = keys.iter().map(|k| k.len().max(12)).collect();
        let _ = write!(out, "   {:<id_w$}  ok ", "probe");
        for (k, w) in keys.iter().zip(&col_w) {
            let _ = write!(out, " {:>w$}", k, w = *w);
        }
        out.push('\n');
        for r in &self.records {
            let _ = write!(out, "   {:<id_w$}  {} ", r.probe_id, if r.passed { "y " } else { "N " });
            for (k, w) in keys.iter().zip(&col_w) {
                let cell = r.values.get(*k).map_or(String::from("-"), |v| fmt_num(v.0));
                let _ = write!(out, " {:>w$}", cell, w = *w);
            }
            if let Some(n) = &r.note {
                let _ = write!(out, "  {n}");
            }
            out.push('\n');
        }
        out
    }

    /// Rows `check,probe_id,x,value` for every record value.
    pub fn plot_rows(&self) -> Vec<String> {
        let mut rows = Vec::new();
        for r in &self.records {
            for (k, v) in &r.values {
                rows.push(format!("{},{},{},{}", self.check, r.probe_id, k, fmt_num(v.0)));
            }
        }
        rows
    }
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6e}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_and_json() {
        let mut r = VerificationReport::new("demo");
        r.push(ProbeRecord::new("p0", true).with("ratio", 1.0));
        r.push(ProbeRecord::new("p1", false).with("ratio", f64::INFINITY));
        r.aggregate("max_ratio", f64::INFINITY);
        r.finish(true);
        assert!(!r.passed);
        let t = r.to_table();
        assert!(t.contains("FAIL") && t.contains("inf"));
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.get("max_ratio"), Some(f64::INFINITY));
        assert_eq!(r.plot_rows()[0], "demo,p0,ratio,1.000000e0");
    }
}
