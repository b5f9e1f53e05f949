//! Regression baseline for the Heisenberg-type ratios.

use std::path::Path;

use lbharm_core::family::FAMILY_VERSION;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// The baseline shipped with the binary.
pub const BUNDLED: &str = include_str!("../data/heisenberg_baseline.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    /// Smallest ratio over the functions of the recording run.
    pub min_ratio: f64,
    pub functions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baseline {
    pub family_version: u32,
    pub grid: String,
    pub entries: Vec<Entry>,
}

/// Grid label recorded with the baseline; ratios are grid dependent.
pub const GRID_LABEL: &str = "heisenberg-preset";

impl Baseline {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("heisenberg baseline: {e}")))
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled baseline is valid JSON")
    }

    pub fn empty() -> Self {
        Self { family_version: FAMILY_VERSION, grid: GRID_LABEL.to_string(), entries: Vec::new() }
    }

    /// The entry for (α, a, b) when it was recorded with the current family.
    pub fn lookup(&self, alpha: f64, a: f64, b: f64) -> Option<&Entry> {
        if self.family_version != FAMILY_VERSION || self.grid != GRID_LABEL {
            return None;
        }
        self.entries.iter().find(|e| e.alpha == alpha && e.a == a && e.b == b)
    }

    /// Replaces or inserts an entry, keeping entries sorted.
    pub fn record(&mut self, entry: Entry) {
        self.entries.retain(|e| !(e.alpha == entry.alpha && e.a == entry.a && e.b == entry.b));
        self.entries.push(entry);
        self.entries
            .sort_by(|x, y| (x.alpha, x.a, x.b).partial_cmp(&(y.alpha, y.a, y.b)).unwrap_or(std::cmp::Ordering::Equal));
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Output(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}
