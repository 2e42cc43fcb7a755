//! Check records, the report document and its re-verification.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

/// `Max`: pass iff `residual <= tolerance`. `Min`: pass iff `residual > tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Exact,
    Symbolic,
    Pointwise,
    Quadrature,
    MonteCarlo,
    FiniteDifference,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    /// The identity the check tests.
    pub anchor: String,
    pub status: Status,
    /// `None` when the value is not finite.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    pub provenance: Source,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

fn passes(residual: Option<f64>, tolerance: f64, bound: Bound) -> bool {
    match (residual, bound) {
        (Some(r), Bound::Max) => r <= tolerance,
        (Some(r), Bound::Min) => r > tolerance,
        (None, _) => false,
    }
}

impl Record {
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        tolerance: f64,
        provenance: Source,
    ) -> Self {
        Self::with_bound(name, anchor, residual, tolerance, Bound::Max, provenance)
    }

    pub fn with_bound(
        name: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        tolerance: f64,
        bound: Bound,
        provenance: Source,
    ) -> Self {
        let residual = residual.is_finite().then_some(residual);
        let status = if passes(residual, tolerance, bound) {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: name.into(),
            anchor: anchor.into(),
            status,
            residual,
            tolerance,
            bound,
            provenance,
            detail: None,
        }
    }

    /// Exact yes/no check: residual 0 or 1, tolerance 0.
    pub fn holds(name: impl Into<String>, anchor: impl Into<String>, ok: bool, provenance: Source) -> Self {
        Self::new(name, anchor, if ok { 0.0 } else { 1.0 }, 0.0, provenance)
    }

    /// A check that could not run at all.
    pub fn error(name: impl Into<String>, anchor: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(name, anchor, f64::INFINITY, 0.0, Source::Exact).detail(message)
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub records: Vec<Record>,
    pub values: Value,
    pub certificate: Option<Value>,
    pub timings: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.into(),
            config: config.clone(),
            records: Vec::new(),
            values: Value::Object(Map::new()),
            certificate: None,
            timings: Map::new(),
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn value(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).expect("value serializes");
        self.values
            .as_object_mut()
            .expect("values is an object")
            .insert(key.into(), v);
    }

    pub fn status(&self) -> Status {
        if !self.records.is_empty() && self.records.iter().all(Record::passed) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.passed())
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert(
            "toolkit".into(),
            json!({"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")}),
        );
        m.insert("command".into(), json!(self.command));
        m.insert(
            "config".into(),
            serde_json::to_value(&self.config).expect("config serializes"),
        );
        m.insert(
            "records".into(),
            serde_json::to_value(&self.records).expect("records serialize"),
        );
        m.insert("status".into(), serde_json::to_value(self.status()).unwrap());
        m.insert("values".into(), self.values.clone());
        if let Some(c) = &self.certificate {
            m.insert("certificate".into(), c.clone());
        }
        m.insert("timings".into(), Value::Object(self.timings.clone()));
        Value::Object(m)
    }

    pub fn to_text(&self) -> String {
        json::to_text(&self.to_value())
    }
}

/// The report text with the `timings` field removed, for comparisons.
pub fn without_timings(text: &str) -> Result<String, serde_json::Error> {
    let mut v: Value = serde_json::from_str(text)?;
    if let Some(m) = v.as_object_mut() {
        m.remove("timings");
    }
    Ok(json::to_text(&v))
}

/// Re-checks a serialized report without recomputing anything: every
/// record's status against its residual, tolerance and bound, the overall
/// status, and the certificate verdict. Returns the violations.
pub fn recheck(text: &str) -> Result<Vec<String>, serde_json::Error> {
    let v: Value = serde_json::from_str(text)?;
    let records: Vec<Record> = serde_json::from_value(v["records"].clone())?;
    let mut problems = Vec::new();
    for r in &records {
        let ok = passes(r.residual, r.tolerance, r.bound);
        if ok != r.passed() {
            problems.push(format!(
                "{}: status {:?} disagrees with residual {:?} and tolerance {}",
                r.name, r.status, r.residual, r.tolerance
            ));
        }
    }
    let all = !records.is_empty() && records.iter().all(|r| passes(r.residual, r.tolerance, r.bound));
    let status: Status = serde_json::from_value(v["status"].clone())?;
    if (status == Status::Pass) != all {
        problems.push(format!("overall status {status:?} disagrees with the records"));
    }
    if let Some(c) = v.get("certificate") {
        let verdict = c["verdict"].as_str().unwrap_or("");
        let diagnostics = c["diagnostics"].as_array().map(|d| d.len()).unwrap_or(0);
        if (verdict == "not_local_max") != (diagnostics == 0) {
            problems.push(format!("verdict {verdict:?} with {diagnostics} diagnostics"));
        }
        if verdict == "not_local_max" && status != Status::Pass {
            problems.push("verdict not_local_max on a failing report".into());
        }
    }
    Ok(problems)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_status() {
        assert!(Record::new("a", "x", 1e-10, 1e-9, Source::Pointwise).passed());
        assert!(!Record::new("a", "x", 1e-8, 1e-9, Source::Pointwise).passed());
        assert!(!Record::new("a", "x", f64::NAN, 1e-9, Source::Pointwise).passed());
        assert!(Record::with_bound("a", "x", 1.8, 1e-3, Bound::Min, Source::Both).passed());
        assert!(!Record::with_bound("a", "x", 0.0, 1e-3, Bound::Min, Source::Both).passed());
        assert!(Record::holds("a", "x", true, Source::Exact).passed());
        assert!(!Record::error("a", "x", "boom").passed());
    }

    #[test]
    fn recheck_catches_edits() {
        let mut rep = Report::new("geometry", &RunConfig::default());
        rep.push(Record::new("r", "x", 0.25, 0.5, Source::Pointwise));
        let text = rep.to_text();
        assert!(recheck(&text).unwrap().is_empty());
        let forged = text.replace("2.5000000000000000e-1", "7.5000000000000000e-1");
        assert_ne!(forged, text);
        assert_eq!(recheck(&forged).unwrap().len(), 2);
    }

    #[test]
    fn empty_report_fails() {
        let rep = Report::new("geometry", &RunConfig::default());
        assert_eq!(rep.status(), Status::Fail);
    }
}
