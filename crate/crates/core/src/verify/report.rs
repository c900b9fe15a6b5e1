use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One named check: `pass` is exactly `lower <= value <= threshold`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportEntry {
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    /// The property holds trivially (for example |Du| vanishes identically).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub vacuous: bool,
}

impl ReportEntry {
    pub fn at_most(value: f64, threshold: f64) -> Self {
        Self { value, threshold, pass: value <= threshold, lower: None, vacuous: false }
    }

    pub fn within(value: f64, lower: f64, upper: f64) -> Self {
        Self { value, threshold: upper, pass: value >= lower && value <= upper, lower: Some(lower), vacuous: false }
    }

    pub fn vacuous(threshold: f64) -> Self {
        Self { value: 0.0, threshold, pass: true, lower: None, vacuous: true }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct VerificationReport {
    /// Configuration the checked run was produced with.
    pub config: serde_json::Value,
    pub checks: BTreeMap<String, ReportEntry>,
}

impl VerificationReport {
    pub fn new(config: serde_json::Value) -> Self {
        Self { config, checks: BTreeMap::new() }
    }

    pub fn insert(&mut self, name: &str, entry: ReportEntry) {
        self.checks.insert(name.to_string(), entry);
    }

    /// True when every non-vacuous check passes.
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|e| e.vacuous || e.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, e)| !e.vacuous && !e.pass).map(|(k, _)| k.as_str()).collect()
    }
}
