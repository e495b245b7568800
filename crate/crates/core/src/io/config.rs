//! Run configuration: a sectioned TOML document. All quantities are in units
//! of γ (rates, detunings, Rabi frequencies) and of the standing-wave length
//! scale set by κ (positions).

use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_PROMINENCE_FRACTION;
use crate::error::{Error, Result};
use crate::liouvillian::{SolverOptions, SolverRegistry};
use crate::model::{validate, GridSpec, StandingWaveConfig, SystemParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Peaks below this fraction of the map's largest |χ″| are dropped.
    #[serde(default = "default_prominence")]
    pub min_prominence_fraction: f64,
    /// Contour levels as fractions of the map maximum.
    #[serde(default = "default_contour_fractions")]
    pub contour_fractions: Vec<f64>,
}

fn default_prominence() -> f64 {
    DEFAULT_PROMINENCE_FRACTION
}

fn default_contour_fractions() -> Vec<f64> {
    vec![0.5, 0.7, 0.9]
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            min_prominence_fraction: default_prominence(),
            contour_fractions: default_contour_fractions(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dipole angles for `sweep-theta`.
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    /// Pump rates Γ for `sweep-gamma`.
    #[serde(default = "default_pumps")]
    pub pumps: Vec<f64>,
}

fn default_thetas() -> Vec<f64> {
    use std::f64::consts::PI;
    vec![PI / 12.0, PI / 10.0, PI / 7.0, PI / 5.0]
}

fn default_pumps() -> Vec<f64> {
    vec![2.5, 4.0, 12.0, 15.0]
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            thetas: default_thetas(),
            pumps: default_pumps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; `--out` overrides it.
    #[serde(default = "default_dir")]
    pub dir: String,
    /// File-name prefix for every artifact.
    #[serde(default = "default_prefix")]
    pub prefix: String,
    /// Also write PGM rasters from `map` and the sweeps.
    #[serde(default)]
    pub heatmaps: bool,
}

fn default_dir() -> String {
    "out".to_string()
}

fn default_prefix() -> String {
    "atomloc".to_string()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_dir(),
            prefix: default_prefix(),
            heatmaps: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: SystemParams,
    pub wave: StandingWaveConfig,
    #[serde(default = "GridSpec::default_window")]
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    /// Every violated invariant, prefixed with its section.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut section = |name: &str, v: Vec<String>| out.extend(v.into_iter().map(|m| format!("{name}.{m}")));
        section("params", validate(&self.params).iter().map(|v| v.to_string()).collect());
        section("wave", self.wave.violations());
        section("grid", self.grid.violations());
        let mut solver = self.solver.violations();
        if !SolverRegistry::builtin().contains(&self.solver.method) {
            solver.push(format!("method: unknown solver '{}'", self.solver.method));
        }
        section("solver", solver);

        let mut analysis = Vec::new();
        let f = self.analysis.min_prominence_fraction;
        if !(0.0..1.0).contains(&f) {
            analysis.push(format!("min_prominence_fraction: requires 0 <= value < 1 (got {f})"));
        }
        if let Some(c) = self.analysis.contour_fractions.iter().find(|c| !c.is_finite()) {
            analysis.push(format!("contour_fractions: requires finite values (got {c})"));
        }
        section("analysis", analysis);

        let mut sweep = Vec::new();
        for &t in &self.sweep.thetas {
            if let Err(e) = crate::model::p_from_theta(t) {
                sweep.push(format!("thetas: {e}"));
            }
        }
        if let Some(g) = self.sweep.pumps.iter().find(|g| !(**g >= 0.0)) {
            sweep.push(format!("pumps: requires pump >= 0 (got {g})"));
        }
        section("sweep", sweep);
        out
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Validation(v))
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig always serializes")
    }
}

/// Parses and validates a config document; omitted solver, analysis, sweep
/// and output sections take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.validated()
}
