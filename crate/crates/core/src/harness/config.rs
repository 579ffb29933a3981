use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::fluctuations::DEFAULT_DIVERGENCE_BOUND;
use crate::params::{ModelParams, PumpModel, Truncation, DEFAULT_DIM_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MasterEq,
    RateEq,
    Semiclassical,
    Fluctuations,
    Sde,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::MasterEq => "master-eq",
            Method::RateEq => "rate-eq",
            Method::Semiclassical => "semiclassical",
            Method::Fluctuations => "fluctuations",
            Method::Sde => "sde",
        }
    }

    fn needs_coherent(self) -> bool {
        matches!(self, Method::Semiclassical | Method::Fluctuations | Method::Sde)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Names accepted as scan axes: the rate fields of [`ModelParams`], the pump
/// amplitudes, and `epsilon` (pump in units of the threshold).
pub const SCAN_PARAMETERS: [&str; 10] = [
    "eta", "kappa_a", "kappa_b", "kappa_c", "kappa_bc", "kappa_cb", "mu_in", "mu_out", "mu", "epsilon",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanAxis {
    pub parameter: String,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
    /// Explicit values, instead of start/stop/points.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    /// Further parameters set to the scan value at every point.
    #[serde(default)]
    pub tied: Vec<String>,
}

impl ScanAxis {
    pub fn linear(parameter: &str, start: f64, stop: f64, points: usize) -> Self {
        ScanAxis {
            parameter: parameter.into(),
            start: Some(start),
            stop: Some(stop),
            points: Some(points),
            spacing: Spacing::Linear,
            values: None,
            tied: Vec::new(),
        }
    }

    pub fn list(parameter: &str, values: &[f64]) -> Self {
        ScanAxis {
            parameter: parameter.into(),
            start: None,
            stop: None,
            points: None,
            spacing: Spacing::Linear,
            values: Some(values.to_vec()),
            tied: Vec::new(),
        }
    }

    /// Grid values; call after validation.
    pub fn grid(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            return v.clone();
        }
        let (a, b, n) = (self.start.unwrap_or(0.0), self.stop.unwrap_or(0.0), self.points.unwrap_or(1));
        if n == 1 {
            return vec![a];
        }
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => a + (b - a) * t,
                    Spacing::Log => (a.ln() + (b.ln() - a.ln()) * t).exp(),
                }
            })
            .collect()
    }

    fn check(&self, errs: &mut Vec<String>) {
        let mut names = vec![self.parameter.as_str()];
        names.extend(self.tied.iter().map(String::as_str));
        for n in names {
            if !SCAN_PARAMETERS.contains(&n) {
                errs.push(format!("scan.parameter: unknown parameter `{n}` (expected one of {SCAN_PARAMETERS:?})"));
            }
        }
        let vals: Vec<f64> = match (&self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => {
                if v.is_empty() {
                    errs.push("scan.values: must not be empty".into());
                }
                v.clone()
            }
            (None, Some(a), Some(b), Some(n)) => {
                if n == 0 {
                    errs.push("scan.points: must be >= 1".into());
                }
                vec![a, b]
            }
            _ => {
                errs.push("scan: give either `values` or all of `start`, `stop`, `points`".into());
                Vec::new()
            }
        };
        if vals.iter().any(|v| !v.is_finite()) {
            errs.push("scan: range must be finite".into());
        }
        if self.spacing == Spacing::Log && vals.iter().any(|&v| v <= 0.0) {
            errs.push("scan.spacing: log spacing needs a positive range".into());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateGrid {
    pub n_max: usize,
    pub m_max: usize,
}

impl Default for RateGrid {
    fn default() -> Self {
        RateGrid { n_max: 60, m_max: 60 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSettings {
    pub omega_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeSettings {
    pub n_traj: usize,
    pub t: f64,
    pub dt: f64,
    #[serde(default = "default_bound")]
    pub divergence_bound: f64,
}

fn default_bound() -> f64 {
    DEFAULT_DIVERGENCE_BOUND
}

impl Default for SdeSettings {
    fn default() -> Self {
        SdeSettings {
            n_traj: 10_000,
            t: 10.0,
            dt: 1e-3,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub method: Method,
    pub params: ModelParams,
    /// Pump in units of the threshold; replaces `params.pump.mu`.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Chooses the pump so that the mean-field a-mode intensity equals this
    /// value at every scan point; replaces `epsilon`.
    #[serde(default)]
    pub target_intensity: Option<f64>,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default = "default_cap")]
    pub dim_cap: usize,
    #[serde(default)]
    pub grid: RateGrid,
    #[serde(default)]
    pub scan: Option<ScanAxis>,
    #[serde(default)]
    pub spectrum: Option<SpectrumSettings>,
    #[serde(default)]
    pub sde: SdeSettings,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSettings,
}

fn default_name() -> String {
    "scenario".into()
}

fn default_cap() -> usize {
    DEFAULT_DIM_CAP
}

impl ScenarioConfig {
    pub fn new(name: &str, method: Method, params: ModelParams) -> Self {
        ScenarioConfig {
            name: name.into(),
            method,
            params,
            epsilon: None,
            target_intensity: None,
            truncation: Truncation::default(),
            dim_cap: DEFAULT_DIM_CAP,
            grid: RateGrid::default(),
            scan: None,
            spectrum: None,
            sde: SdeSettings::default(),
            seed: 0,
            output: OutputSettings::default(),
        }
    }

    /// Every violated constraint, one field-level message each.
    pub fn errors(&self) -> Vec<String> {
        let mut errs: Vec<String> = self.params.violations().iter().map(|e| format!("params: {e}")).collect();
        let coherent = matches!(self.params.pump, PumpModel::Coherent { .. });
        if self.method.needs_coherent() && !coherent {
            errs.push(format!("params.pump: method {} needs kind = \"coherent\"", self.method.name()));
        }
        if self.method == Method::RateEq && coherent {
            errs.push("params.pump: method rate-eq needs kind = \"incoherent\"".into());
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            errs.push(format!("name: `{}` must be non-empty and use [A-Za-z0-9_-]", self.name));
        }
        for (field, v) in [("epsilon", self.epsilon), ("target_intensity", self.target_intensity)] {
            if let Some(x) = v {
                if !(x.is_finite() && x >= 0.0) {
                    errs.push(format!("{field}: must be finite and >= 0, got {x}"));
                }
                if !self.method.needs_coherent() {
                    errs.push(format!("{field}: only used by coherent-pump methods"));
                }
            }
        }
        if self.epsilon.is_some() && self.target_intensity.is_some() {
            errs.push("target_intensity: conflicts with epsilon".into());
        }
        if let Some(scan) = &self.scan {
            scan.check(&mut errs);
            let names: Vec<&str> = std::iter::once(scan.parameter.as_str())
                .chain(scan.tied.iter().map(String::as_str))
                .collect();
            for n in names {
                let ok = match n {
                    "mu_in" | "mu_out" => !coherent,
                    "mu" | "epsilon" => coherent && self.target_intensity.is_none(),
                    "kappa_cb" => !coherent,
                    _ => true,
                };
                if !ok {
                    errs.push(format!("scan.parameter: `{n}` does not apply to this pump model or pump setting"));
                }
            }
        }
        if self.method == Method::MasterEq {
            if let Err(e) = self.truncation.validate(self.dim_cap) {
                errs.push(format!("truncation: {e}"));
            }
        }
        if self.method == Method::RateEq && (self.grid.n_max == 0 || self.grid.m_max == 0) {
            errs.push("grid: n_max and m_max must be >= 1".into());
        }
        if let Some(s) = &self.spectrum {
            if !(s.omega_max.is_finite() && s.omega_max > 0.0) {
                errs.push("spectrum.omega_max: must be finite and > 0".into());
            }
            if s.points < 2 {
                errs.push("spectrum.points: must be >= 2".into());
            }
            if self.method != Method::Fluctuations {
                errs.push("spectrum: only used by method fluctuations".into());
            }
        }
        if self.method == Method::Sde {
            let s = &self.sde;
            if s.n_traj == 0 {
                errs.push("sde.n_traj: must be >= 1".into());
            }
            if !(s.t.is_finite() && s.t >= 0.0) {
                errs.push("sde.t: must be finite and >= 0".into());
            }
            if !(s.dt.is_finite() && s.dt > 0.0) {
                errs.push("sde.dt: must be finite and > 0".into());
            }
            if !(s.divergence_bound > 0.0) {
                errs.push("sde.divergence_bound: must be > 0".into());
            }
        }
        errs
    }
}

/// Parse and check a TOML scenario, collecting every problem found.
pub fn validate_config(text: &str) -> std::result::Result<ScenarioConfig, Vec<String>> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| vec![e.to_string()])?;
    let errs = cfg.errors();
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(errs)
    }
}
