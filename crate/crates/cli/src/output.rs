//! The report document and its JSON / CSV encodings.

use std::io::Write;

use lbharm_core::InequalityReport;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

/// One asserted property: `value relation threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => value <= threshold,
            Relation::Below => value < threshold,
            Relation::AtLeast => value >= threshold,
            Relation::Above => value > threshold,
        };
        Self { name: name.into(), value, relation, threshold, pass }
    }

    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::AtMost, threshold)
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::AtLeast, threshold)
    }

    /// Upper-bound report: worst ratio below 1 − grid_error_estimate.
    pub fn strict(r: &InequalityReport, label: &str) -> Self {
        Self::new(format!("{}[{label}] strict", r.name), r.worst_ratio(), Relation::Below, 1.0 - r.grid_error_estimate)
    }

    /// Upper-bound report: worst ratio at most 1 + grid_error_estimate.
    pub fn holds(r: &InequalityReport, label: &str) -> Self {
        Self::at_most(format!("{}[{label}] holds", r.name), r.worst_ratio(), 1.0 + r.grid_error_estimate)
    }
}

/// Results of one command.
#[derive(Debug, Default)]
pub struct Outcome {
    pub reports: Vec<InequalityReport>,
    pub checks: Vec<Check>,
    pub data: serde_json::Map<String, Value>,
}

impl Outcome {
    pub fn data(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Serialize)]
pub struct Document<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: &'a RunConfig,
    pub passed: bool,
    pub reports: &'a [InequalityReport],
    pub checks: &'a [Check],
    pub data: &'a serde_json::Map<String, Value>,
}

impl<'a> Document<'a> {
    pub fn new(command: &'a str, config: &'a RunConfig, outcome: &'a Outcome) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            passed: outcome.passed(),
            reports: &outcome.reports,
            checks: &outcome.checks,
            data: &outcome.data,
        }
    }
}

/// Removes every `runtime_ms` field.
pub fn strip_runtimes(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("runtime_ms");
            map.values_mut().for_each(strip_runtimes);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_runtimes),
        _ => {}
    }
}

pub fn to_json(doc: &Document<'_>, canonical: bool) -> Result<String, CliError> {
    let mut v = serde_json::to_value(doc).map_err(|e| CliError::Output(e.to_string()))?;
    if canonical {
        strip_runtimes(&mut v);
    }
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

const REPORT_COLUMNS: [&str; 14] = [
    "command",
    "name",
    "bound",
    "lhs",
    "rhs_paper",
    "rhs_oracle",
    "ratio_paper",
    "ratio_oracle",
    "strict",
    "holds",
    "grid_error_estimate",
    "runtime_ms",
    "params",
    "grid",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per report; commands without reports get one row per check.
pub fn to_csv(doc: &Document<'_>, canonical: bool) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Output(e.to_string());
    if doc.reports.is_empty() {
        w.write_record(["command", "name", "value", "relation", "threshold", "pass"]).map_err(err)?;
        for c in doc.checks {
            let rel = serde_json::to_value(c.relation).unwrap_or(Value::Null);
            w.write_record([
                doc.command.to_string(),
                c.name.clone(),
                c.value.to_string(),
                rel.as_str().unwrap_or("").to_string(),
                c.threshold.to_string(),
                c.pass.to_string(),
            ])
            .map_err(err)?;
        }
    } else {
        w.write_record(REPORT_COLUMNS).map_err(err)?;
        for r in doc.reports {
            let bound = serde_json::to_value(r.bound).unwrap_or(Value::Null);
            w.write_record([
                doc.command.to_string(),
                r.name.clone(),
                bound.as_str().unwrap_or("").to_string(),
                r.lhs.to_string(),
                r.rhs_paper.to_string(),
                opt(r.rhs_oracle),
                r.ratio_paper.to_string(),
                opt(r.ratio_oracle),
                r.strict.to_string(),
                r.holds.to_string(),
                r.grid_error_estimate.to_string(),
                if canonical { String::new() } else { opt(r.runtime_ms) },
                serde_json::to_string(&r.params).unwrap_or_default(),
                serde_json::to_string(&r.grid).unwrap_or_default(),
            ])
            .map_err(err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

/// Writes the document to the configured path, or stdout.
pub fn emit(doc: &Document<'_>, format: Format, canonical: bool) -> Result<(), CliError> {
    let text = match format {
        Format::Json => to_json(doc, canonical)?,
        Format::Csv => to_csv(doc, canonical)?,
    };
    match &doc.config.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_evaluate_their_relation() {
        assert!(Check::at_most("a", 1.0, 1.0).pass);
        assert!(!Check::new("a", 1.0, Relation::Below, 1.0).pass);
        assert!(Check::at_least("a", 2.0, 1.0).pass);
        assert!(!Check::at_most("a", f64::NAN, 1.0).pass);
    }

    #[test]
    fn canonical_json_drops_runtimes_only() {
        let mut o = Outcome::default();
        let mut r = InequalityReport::upper("x", 1.0, 2.0, None, 0.0);
        r.runtime_ms = Some(3.0);
        o.reports.push(r);
        o.data("k", 1);
        let cfg = RunConfig::default();
        let doc = Document::new("verify", &cfg, &o);
        let full = to_json(&doc, false).unwrap();
        let canon = to_json(&doc, true).unwrap();
        assert!(full.contains("runtime_ms") && !canon.contains("runtime_ms"));
        assert!(canon.contains("\"k\": 1"));
    }

    #[test]
    fn csv_has_one_row_per_report() {
        let mut o = Outcome::default();
        o.reports.push(InequalityReport::upper("x", 1.0, 2.0, Some(1.5), 0.0).with_param("s", 1.0));
        o.reports.push(InequalityReport::lower("y", 1.0, 2.0, 0.0));
        let cfg = RunConfig::default();
        let text = to_csv(&Document::new("verify", &cfg, &o), true).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rd.headers().unwrap().len(), REPORT_COLUMNS.len());
        assert_eq!(rd.records().count(), 2);
    }
}
