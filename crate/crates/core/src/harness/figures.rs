use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::config::{Format, Method, ScanAxis, ScenarioConfig, Spacing, SpectrumSettings};
use super::run::run_scenario;
use super::table::{ResultTable, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::params::{ModelParams, Truncation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig5a,
        FigureId::Fig5b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
        }
    }
}

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::param("figure", format!("unknown id `{s}`")))
    }
}

/// Everything needed to regenerate a figure's data.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub figure: FigureId,
    pub package: String,
    pub version: String,
    pub seed: u64,
    pub scenarios: Vec<ScenarioConfig>,
    /// Additional axis along which scenario tables were stacked.
    pub stacked_over: Option<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub files: Vec<String>,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub tables: Vec<ResultTable>,
    pub manifest: Manifest,
}

fn tolerances() -> BTreeMap<String, f64> {
    use crate::{fluctuations as fl, fock, rate_eq as re};
    [
        ("master_residual", fock::RESIDUAL_TOL),
        ("master_positivity", fock::POSITIVITY_TOL),
        ("master_tail", fock::TAIL_TOL),
        ("rate_residual", re::RATE_RESIDUAL_TOL),
        ("rate_tail", re::RATE_TAIL_TOL),
        ("elimination_ratio", re::DEFAULT_VALIDITY_RATIO),
        ("quadrature_rel", fl::QUAD_REL_TOL),
        ("neutral_mode", fl::NEUTRAL_TOL),
        ("spectrum_reality", fl::REALITY_TOL),
        ("linearization_ratio", fl::LINEARIZATION_FLAG_RATIO),
        ("divergent_fraction", fl::MAX_DIVERGENT_FRACTION),
        ("divergence_bound", fl::DEFAULT_DIVERGENCE_BOUND),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn log_scan(parameter: &str, start: f64, stop: f64, points: usize) -> ScanAxis {
    let mut s = ScanAxis::linear(parameter, start, stop, points);
    s.spacing = Spacing::Log;
    s
}

/// Scenarios of a figure, and the parameter they are stacked over (if any).
pub fn figure_scenarios(id: FigureId, seed: u64) -> (Vec<ScenarioConfig>, Option<&'static str>) {
    let mut out = Vec::new();
    let mut stacked = None;
    match id {
        FigureId::Fig2 => {
            // mu_out = 0.9 mu_in = 3 eta / 8, kappa_cb = eta / 80, eta = 1.
            let eta = 1.0;
            let mu_out = 3.0 * eta / 8.0;
            for (k, kb) in [0.5, 1.0, 2.0].into_iter().enumerate() {
                let mut p = ModelParams::incoherent(eta, 1.0, kb, mu_out / 0.9, mu_out);
                p.kappa_cb = eta / 80.0;
                let mut c = ScenarioConfig::new(&format!("fig2_kb{k}"), Method::MasterEq, p);
                c.truncation = Truncation::new(8, 8, 3);
                c.scan = Some(log_scan("kappa_a", 0.2, 30.0, 8));
                out.push(c);
            }
            stacked = Some("kappa_b");
        }
        FigureId::Fig3 => {
            let p = ModelParams::incoherent(20.0, 1.0, 1.0, 50.0, 10.0);
            let mut c = ScenarioConfig::new("fig3", Method::RateEq, p);
            c.scan = Some(ScanAxis::linear("mu_in", 12.0, 60.0, 20));
            out.push(c);
        }
        FigureId::Fig4a => {
            let p = ModelParams::coherent(4.0, 1.0, 1.0, 2.0, 0.0, 1.0);
            let mut c = ScenarioConfig::new("fig4a", Method::Fluctuations, p);
            c.scan = Some(ScanAxis::linear("mu", 0.55, 5.0, 40));
            out.push(c);
        }
        FigureId::Fig4b => {
            let p = ModelParams::coherent(10.0, 1.0, 1.0, 1.0, 0.0, 1.0);
            let mut c = ScenarioConfig::new("fig4b", Method::Fluctuations, p);
            let mut s = log_scan("kappa_a", 3.0, 0.01, 30);
            s.tied = vec!["kappa_b".into()];
            c.scan = Some(s);
            c.target_intensity = Some(1.0);
            out.push(c);
        }
        FigureId::Fig5a => {
            let p = ModelParams::coherent(10.0, 0.2, 0.2, 1.0, 0.0, 1.0);
            let mut c = ScenarioConfig::new("fig5a", Method::Fluctuations, p);
            c.scan = Some(ScanAxis::list("epsilon", &[1.5, 2.7, 20.0]));
            c.spectrum = Some(SpectrumSettings {
                omega_max: 2.0,
                points: 201,
            });
            out.push(c);
        }
        FigureId::Fig5b => {
            let p = ModelParams::coherent(10.0, 0.2, 0.2, 1.0, 0.0, 1.0);
            let mut c = ScenarioConfig::new("fig5b_spectra", Method::Fluctuations, p);
            c.epsilon = Some(3.0);
            c.scan = Some(ScanAxis::list("kappa_bc", &[0.0, 0.2]));
            c.spectrum = Some(SpectrumSettings {
                omega_max: 2.0,
                points: 201,
            });
            out.push(c);
            let mut inset = ScenarioConfig::new("fig5b_inset", Method::Fluctuations, p);
            inset.epsilon = Some(3.0);
            inset.scan = Some(ScanAxis::linear("kappa_bc", 0.0, 0.4, 21));
            out.push(inset);
        }
    }
    for c in &mut out {
        c.seed = seed;
    }
    (out, stacked)
}

/// Run the registered recipe for `id`.
pub fn reproduce_figure(id: FigureId, seed: u64) -> Result<FigureOutput> {
    let (scenarios, stacked) = figure_scenarios(id, seed);
    let mut tables = Vec::new();
    for c in &scenarios {
        tables.push(run_scenario(c)?);
    }
    if let Some(axis) = stacked {
        let parts = scenarios
            .iter()
            .zip(tables)
            .map(|(c, t)| t.with_constant(axis, c.params.kappa_b))
            .collect();
        tables = vec![ResultTable::stack(id.name(), parts)];
    }
    let failures = tables.iter().map(ResultTable::failures).sum();
    Ok(FigureOutput {
        tables,
        manifest: Manifest {
            schema_version: SCHEMA_VERSION,
            figure: id,
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            scenarios,
            stacked_over: stacked.map(String::from),
            tolerances: tolerances(),
            files: Vec::new(),
            failures,
        },
    })
}

impl FigureOutput {
    /// Write every table plus `<figure>_manifest.json` into `dir`.
    pub fn write(&mut self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        let mut files = Vec::new();
        for t in &self.tables {
            files.extend(t.write(dir, format)?);
        }
        self.manifest.files = files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect();
        let path = dir.join(format!("{}_manifest.json", self.manifest.figure.name()));
        let text = serde_json::to_string_pretty(&self.manifest).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(&path, text + "\n")?;
        files.push(path);
        Ok(files)
    }
}
