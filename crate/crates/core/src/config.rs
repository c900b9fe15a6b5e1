//! Solver configuration: a JSON document whose fields all have defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::boundary::BoundaryData;
use crate::domain::grid::{SectorGrid, Spacing};
use crate::error::{Error, Result};
use crate::flow::run::{FlowConfig, InitialMode};

pub const DEFAULT_EPS_FRACTION: f64 = 0.5;

/// How the shape f^ is scaled to the boundary data f.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scaling {
    Absolute(f64),
    Fraction(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(rename = "R")]
    pub r_inner: f64,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    pub nr: usize,
    pub ntheta: usize,
    #[serde(rename = "N")]
    pub n: u32,
    pub spacing: Spacing,
    /// Shape f^(theta) = sum a_k sin(k N theta), keyed by odd k.
    pub coefficients: BTreeMap<String, f64>,
    /// f = eps_scale f^. Exclusive with `eps_fraction`.
    pub eps_scale: Option<f64>,
    /// f scaled so that ||f||_{C^4} = eps_fraction * eps_max. When neither
    /// this nor `eps_scale` is set the fraction is 1/2.
    pub eps_fraction: Option<f64>,
    #[serde(rename = "R0")]
    pub r0: f64,
    pub c_cfl: f64,
    pub tol_steady: f64,
    pub tau_max: f64,
    pub tau_min: f64,
    pub record_dtau: f64,
    /// Field snapshot every this many steps; 0 disables snapshots.
    pub snapshot_every: u64,
    pub output_dir: String,
    pub barriers: bool,
    pub initial: InitialMode,
    /// Names of checks to run; empty means all.
    pub checks: Vec<String>,
    pub force: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            r_inner: 1.0,
            r_max: 16.0,
            nr: 257,
            ntheta: 65,
            n: 5,
            spacing: Spacing::LogGraded,
            coefficients: BTreeMap::from([("1".to_string(), 1.0)]),
            eps_scale: None,
            eps_fraction: None,
            r0: 1.0,
            c_cfl: 0.4,
            tol_steady: 1e-8,
            tau_max: 30.0,
            tau_min: 0.2,
            record_dtau: 0.01,
            snapshot_every: 0,
            output_dir: "out".to_string(),
            barriers: true,
            initial: InitialMode::Linear,
            checks: Vec::new(),
            force: false,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn grid(&self) -> Result<SectorGrid> {
        SectorGrid::new(self.r_inner, self.r_max, self.nr, self.ntheta, self.n, self.spacing)
    }

    /// The shape f^ before scaling.
    pub fn shape(&self) -> Result<BoundaryData> {
        let mut modes = Vec::new();
        for (k, &a) in &self.coefficients {
            let k: u32 = k.trim().parse().map_err(|_| Error::InvalidBoundary(format!("mode key {k:?} is not an integer")))?;
            modes.push((k, a));
        }
        BoundaryData::new(self.n, modes)
    }

    pub fn flow(&self) -> FlowConfig {
        FlowConfig {
            c_cfl: self.c_cfl,
            tol_steady: self.tol_steady,
            tau_max: self.tau_max,
            tau_min: self.tau_min,
            record_dtau: self.record_dtau,
            ..FlowConfig::default()
        }
    }

    pub fn scaling(&self) -> Scaling {
        match (self.eps_scale, self.eps_fraction) {
            (Some(s), _) => Scaling::Absolute(s),
            (None, Some(f)) => Scaling::Fraction(f),
            (None, None) => Scaling::Fraction(DEFAULT_EPS_FRACTION),
        }
    }

    pub fn wants(&self, check: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|c| c == check)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.shape()?;
        if self.eps_scale.is_some() && self.eps_fraction.is_some() {
            return Err(Error::InvalidConfig("set at most one of eps_scale and eps_fraction".into()));
        }
        for (name, v) in [("eps_scale", self.eps_scale), ("eps_fraction", self.eps_fraction)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidConfig(format!("{name} = {v} must be finite and non-negative")));
                }
            }
        }
        if !(self.c_cfl > 0.0 && self.c_cfl <= 1.0) {
            return Err(Error::InvalidConfig(format!("c_cfl = {} must lie in (0, 1]", self.c_cfl)));
        }
        if !(self.tol_steady > 0.0 && self.tau_max > 0.0 && self.record_dtau > 0.0 && self.tau_min >= 0.0) {
            return Err(Error::InvalidConfig("tol_steady, tau_max, record_dtau must be positive and tau_min >= 0".into()));
        }
        if !(self.r0 > std::f64::consts::FRAC_1_SQRT_2) {
            return Err(Error::InvalidConfig(format!("R0 = {} must exceed 1/sqrt(2)", self.r0)));
        }
        Ok(())
    }
}
