//! Probe absorption χ″ = α·Im[ρ13/Ωp] at a point, over a grid, and across
//! parameter sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{localization_report, PeakReport, DEFAULT_PROMINENCE_FRACTION};
use crate::error::{Error, Result};
use crate::liouvillian::SteadyStateSolver;
use crate::model::{GridSpec, StandingWaveConfig, SystemParams};
use crate::wave::rabi_at;

/// χ″ sampled on a grid. `values[i * ny + j]` belongs to node `(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorptionMap {
    pub grid: GridSpec,
    pub params: SystemParams,
    pub wave: StandingWaveConfig,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl AbsorptionMap {
    /// Wraps precomputed values; fails if the length or finiteness is wrong.
    pub fn from_values(
        grid: GridSpec,
        params: SystemParams,
        wave: StandingWaveConfig,
        values: Vec<f64>,
    ) -> Result<Self> {
        let grid = grid.validated()?;
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "map has {} values for a {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("non-finite map value at index {k}")));
        }
        Ok(AbsorptionMap {
            grid,
            params,
            wave,
            values,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.ny + j]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Swaps the roles of x and y.
    pub fn transpose(&self) -> Self {
        let g = &self.grid;
        let grid = GridSpec {
            xmin: g.ymin,
            xmax: g.ymax,
            ymin: g.xmin,
            ymax: g.xmax,
            nx: g.ny,
            ny: g.nx,
        };
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..g.ny {
            for i in 0..g.nx {
                values.push(self.get(i, j));
            }
        }
        AbsorptionMap {
            grid,
            params: self.params,
            wave: StandingWaveConfig {
                kappa1: self.wave.kappa2,
                kappa2: self.wave.kappa1,
                delta_phase: self.wave.eta_phase,
                eta_phase: self.wave.delta_phase,
                ..self.wave
            },
            values,
        }
    }

    /// Largest entrywise |a − b| against a map on the same lattice shape.
    pub fn max_abs_diff(&self, other: &AbsorptionMap) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// χ″ from an already-solved ρ13.
pub fn chi_from_rho13(params: &SystemParams, rho13: num_complex::Complex64) -> f64 {
    params.alpha * (rho13.im / params.omega_p)
}

fn require_probe(params: &SystemParams) -> Result<()> {
    if params.omega_p > 0.0 {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "absorption needs omega_p > 0 (got {})",
            params.omega_p
        )))
    }
}

/// χ″ at position `(x, y)`.
pub fn chi_at(
    params: &SystemParams,
    wave: &StandingWaveConfig,
    x: f64,
    y: f64,
    solver: &dyn SteadyStateSolver,
) -> Result<f64> {
    require_probe(params)?;
    let rho = solver.solve(params, rabi_at(wave, x, y))?;
    Ok(chi_from_rho13(params, rho.rho13()))
}

/// χ″ at every node of `grid`. Nodes are solved independently in parallel
/// on the current rayon pool; the result does not depend on the pool size.
pub fn compute_map(
    params: &SystemParams,
    wave: &StandingWaveConfig,
    grid: &GridSpec,
    solver: &dyn SteadyStateSolver,
) -> Result<AbsorptionMap> {
    let params = params.validated()?;
    let wave = wave.validated()?;
    let grid = grid.validated()?;
    require_probe(&params)?;

    let ny = grid.ny;
    let results: Vec<Result<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (x, y) = (grid.x(k / ny), grid.y(k % ny));
            chi_at(&params, &wave, x, y, solver).map_err(|e| Error::AtNode {
                x,
                y,
                source: Box::new(e),
            })
        })
        .collect();
    let values = results.into_iter().collect::<Result<Vec<f64>>>()?;
    AbsorptionMap::from_values(grid, params, wave, values)
}

/// Peak statistics of one map in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapSummary {
    pub value: f64,
    pub map_max: f64,
    pub map_min: f64,
    pub report: PeakReport,
}

impl MapSummary {
    /// Height of the tallest peak, if any.
    pub fn peak_height(&self) -> Option<f64> {
        self.report.peaks.first().map(|p| p.peak.height)
    }

    /// max(fwhm_x, fwhm_y) of the tallest peak when both widths are defined.
    pub fn diameter(&self) -> Option<f64> {
        self.report.peaks.first().and_then(|p| p.diameter)
    }
}

pub fn summarize(map: &AbsorptionMap, value: f64, prominence_fraction: f64) -> MapSummary {
    let max = map.max();
    MapSummary {
        value,
        map_max: max,
        map_min: map.min(),
        report: localization_report(map, prominence_fraction * max.abs()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Name of the swept field of [`SystemParams`].
    pub parameter: String,
    pub values: Vec<f64>,
    pub summaries: Vec<MapSummary>,
    #[serde(skip)]
    pub maps: Vec<AbsorptionMap>,
}

impl SweepResult {
    pub fn peak_heights(&self) -> Vec<Option<f64>> {
        self.summaries.iter().map(MapSummary::peak_height).collect()
    }

    pub fn diameters(&self) -> Vec<Option<f64>> {
        self.summaries.iter().map(MapSummary::diameter).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptions {
    /// Minimum peak prominence as a fraction of the map maximum.
    pub prominence_fraction: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            prominence_fraction: DEFAULT_PROMINENCE_FRACTION,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    parameter: &str,
    values: &[f64],
    set: impl Fn(SystemParams, f64) -> SystemParams,
    base: &SystemParams,
    wave: &StandingWaveConfig,
    grid: &GridSpec,
    solver: &dyn SteadyStateSolver,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    let mut summaries = Vec::with_capacity(values.len());
    let mut maps = Vec::with_capacity(values.len());
    for &v in values {
        let map = compute_map(&set(*base, v), wave, grid, solver)?;
        summaries.push(summarize(&map, v, opts.prominence_fraction));
        maps.push(map);
    }
    Ok(SweepResult {
        parameter: parameter.to_string(),
        values: values.to_vec(),
        summaries,
        maps,
    })
}

/// One map per dipole angle, in input order.
pub fn sweep_theta(
    base: &SystemParams,
    wave: &StandingWaveConfig,
    grid: &GridSpec,
    thetas: &[f64],
    solver: &dyn SteadyStateSolver,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    for &t in thetas {
        crate::model::p_from_theta(t)?;
    }
    sweep("theta", thetas, SystemParams::with_theta, base, wave, grid, solver, opts)
}

/// One map per pump rate Γ, in input order.
pub fn sweep_gamma(
    base: &SystemParams,
    wave: &StandingWaveConfig,
    grid: &GridSpec,
    pumps: &[f64],
    solver: &dyn SteadyStateSolver,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    if let Some(&g) = pumps.iter().find(|g| !(**g >= 0.0)) {
        return Err(Error::InvalidParams(vec![crate::model::Violation {
            field: "pump",
            rule: "pump >= 0",
            value: g,
        }]));
    }
    sweep("pump", pumps, SystemParams::with_pump, base, wave, grid, solver, opts)
}
