//! The record produced by every inequality check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Direction of the verified inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// lhs ≤ rhs
    Upper,
    /// lhs ≥ C·rhs for some unknown C > 0; ratios are tracked against a baseline.
    Lower,
}

/// Both sides of one inequality with closed-form (`paper`) and quadrature (`oracle`) constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub bound: Bound,
    pub params: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs_paper: f64,
    pub rhs_oracle: Option<f64>,
    pub ratio_paper: f64,
    pub ratio_oracle: Option<f64>,
    /// Upper bounds: the larger ratio is below 1 − grid_error_estimate.
    /// Lower bounds: the ratio is positive.
    pub strict: bool,
    /// Upper bounds: the larger ratio is at most 1 + grid_error_estimate.
    pub holds: bool,
    pub grid_error_estimate: f64,
    pub grid: Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<f64>,
}

impl InequalityReport {
    /// Upper-bound report; `rhs_oracle` is dropped when it equals the closed-form value.
    pub fn upper(
        name: impl Into<String>,
        lhs: f64,
        rhs_paper: f64,
        rhs_oracle: Option<f64>,
        grid_error_estimate: f64,
    ) -> Self {
        let rhs_oracle = rhs_oracle.filter(|o| (o - rhs_paper).abs() > 1e-14 * rhs_paper.abs());
        let ratio_paper = lhs / rhs_paper;
        let ratio_oracle = rhs_oracle.map(|o| lhs / o);
        let worst = ratio_oracle.map_or(ratio_paper, |o| o.max(ratio_paper));
        Self {
            name: name.into(),
            bound: Bound::Upper,
            params: BTreeMap::new(),
            lhs,
            rhs_paper,
            rhs_oracle,
            ratio_paper,
            ratio_oracle,
            strict: worst < 1.0 - grid_error_estimate,
            holds: worst <= 1.0 + grid_error_estimate,
            grid_error_estimate,
            grid: Value::Null,
            runtime_ms: None,
        }
    }

    /// Lower-bound report with an unspecified constant: rhs is the quantity
    /// being bounded and the ratio lhs/rhs is the tracked value.
    pub fn lower(name: impl Into<String>, lhs: f64, rhs: f64, grid_error_estimate: f64) -> Self {
        let ratio = lhs / rhs;
        Self {
            name: name.into(),
            bound: Bound::Lower,
            params: BTreeMap::new(),
            lhs,
            rhs_paper: rhs,
            rhs_oracle: None,
            ratio_paper: ratio,
            ratio_oracle: None,
            strict: ratio > 0.0,
            holds: ratio > 0.0,
            grid_error_estimate,
            grid: Value::Null,
            runtime_ms: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn with_grid(mut self, grid: Value) -> Self {
        self.grid = grid;
        self
    }

    /// The ratio against the smaller right-hand side.
    pub fn worst_ratio(&self) -> f64 {
        self.ratio_oracle.map_or(self.ratio_paper, |o| o.max(self.ratio_paper))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strictness_uses_smaller_rhs() {
        let r = InequalityReport::upper("x", 1.0, 4.0, Some(1.5), 0.01);
        assert_eq!(r.ratio_paper, 0.25);
        assert!(r.strict);
        let r = InequalityReport::upper("x", 1.0, 4.0, Some(1.005), 0.01);
        assert!(!r.strict && r.holds);
        let r = InequalityReport::upper("x", 1.0, 2.0, Some(2.0), 0.0);
        assert!(r.rhs_oracle.is_none());
    }

    #[test]
    fn runtime_is_not_serialized_when_absent() {
        let r = InequalityReport::lower("h", 2.0, 1.0, 0.0).with_param("a", 1.0);
        let s = serde_json::to_string(&r).unwrap();
        assert!(!s.contains("runtime_ms"));
        let back: InequalityReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
