use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::absorption::{compute_map, sweep_gamma, sweep_theta, AbsorptionMap, SweepOptions, SweepResult};
use crate::analysis::{contour_polylines, localization_report, ContourSet};
use crate::analytic::{discrepancy_report, first_order, rho13_first_order, DiscrepancyReport};
use crate::error::{Error, Result};
use crate::liouvillian::{propagate_with_stats, DirectSolver, SolverOptions, SolverRegistry, SteadyStateSolver};
use crate::model::{DensityMatrix, SystemParams};

use super::config::RunConfig;
use super::output::{render_heatmap, write_contours_csv, write_json, write_map_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Map,
    SweepTheta,
    SweepGamma,
    Contours,
    Validate,
    Render,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Map => "map",
            Command::SweepTheta => "sweep-theta",
            Command::SweepGamma => "sweep-gamma",
            Command::Contours => "contours",
            Command::Validate => "validate",
            Command::Render => "render",
        }
    }
}

/// Files written by a run, plus non-fatal notes such as a degenerate raster range.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    pub notes: Vec<String>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    dir: &'a Path,
    out: RunOutcome,
}

impl Ctx<'_> {
    fn path(&self, stem: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{}_{stem}.{ext}", self.cfg.output.prefix))
    }

    fn csv(&mut self, map: &AbsorptionMap, stem: &str) -> Result<()> {
        let p = self.path(stem, "csv");
        write_map_csv(map, &p)?;
        self.out.artifacts.push(p);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, value: &T, stem: &str) -> Result<()> {
        let p = self.path(stem, "json");
        write_json(value, &p)?;
        self.out.artifacts.push(p);
        Ok(())
    }

    fn pgm(&mut self, map: &AbsorptionMap, stem: &str) -> Result<()> {
        let p = self.path(stem, "pgm");
        if let Some(note) = render_heatmap(map, &p)? {
            self.out.notes.push(format!("{}: {note}", p.display()));
        }
        self.out.artifacts.push(p);
        Ok(())
    }
}

/// Executes `command` and writes its artifacts into `out_dir`, creating it if needed.
pub fn run(command: Command, cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let cfg = cfg.clone().validated()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let solver = SolverRegistry::builtin().create(&cfg.solver)?;
    let mut ctx = Ctx {
        cfg: &cfg,
        dir: out_dir,
        out: RunOutcome::default(),
    };
    let frac = cfg.analysis.min_prominence_fraction;
    let map = || compute_map(&cfg.params, &cfg.wave, &cfg.grid, solver.as_ref());

    match command {
        Command::Map => {
            let m = map()?;
            ctx.csv(&m, "map")?;
            ctx.json(&localization_report(&m, frac * m.max().abs()), "peaks")?;
            if cfg.output.heatmaps {
                ctx.pgm(&m, "map")?;
            }
        }
        Command::SweepTheta | Command::SweepGamma => {
            let opts = SweepOptions {
                prominence_fraction: frac,
            };
            let (stem, result) = if command == Command::SweepTheta {
                let r = sweep_theta(&cfg.params, &cfg.wave, &cfg.grid, &cfg.sweep.thetas, solver.as_ref(), &opts)?;
                ("sweep_theta", r)
            } else {
                let r = sweep_gamma(&cfg.params, &cfg.wave, &cfg.grid, &cfg.sweep.pumps, solver.as_ref(), &opts)?;
                ("sweep_gamma", r)
            };
            write_sweep(&mut ctx, stem, &result)?;
        }
        Command::Contours => {
            let m = map()?;
            let sets = contour_sets(&m, &cfg.analysis.contour_fractions);
            let p = ctx.path("contours", "csv");
            write_contours_csv(&sets, &p)?;
            ctx.out.artifacts.push(p);
        }
        Command::Validate => {
            let report = validate(&cfg)?;
            ctx.json(&report, "validate")?;
        }
        Command::Render => {
            let m = map()?;
            ctx.pgm(&m, "map")?;
        }
    }
    Ok(ctx.out)
}

fn write_sweep(ctx: &mut Ctx, stem: &str, result: &SweepResult) -> Result<()> {
    for (k, m) in result.maps.iter().enumerate() {
        ctx.csv(m, &format!("{stem}_{k}"))?;
        if ctx.cfg.output.heatmaps {
            ctx.pgm(m, &format!("{stem}_{k}"))?;
        }
    }
    ctx.json(result, stem)
}

/// Contours at `fraction × max χ″` for each requested fraction.
pub fn contour_sets(map: &AbsorptionMap, fractions: &[f64]) -> Vec<ContourSet> {
    let max = map.max();
    fractions.iter().map(|f| contour_polylines(map, f * max)).collect()
}

pub const ORACLE_POINTS: usize = 20;
pub const ORACLE_SEED: u64 = 0x5EED_A70C;
pub const ORACLE_TOL: f64 = 1e-8;
pub const TRACE_DRIFT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OraclePoint {
    pub theta: f64,
    pub pump: f64,
    pub omega_c: f64,
    pub max_abs_diff: f64,
    pub max_trace_drift: f64,
    pub propagation_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub points: Vec<OraclePoint>,
    pub max_abs_diff: f64,
    pub max_trace_drift: f64,
    pub passed: bool,
}

/// Direct solve against RK4 propagation on points drawn uniformly over
/// θ ∈ [π/12, π/5], Γ ∈ [0.6, 15] and Ωc ∈ [−2Ωc0, 2Ωc0], the other
/// parameters taken from `base`.
pub fn oracle_equivalence(base: &SystemParams, omega_c0: f64, opts: &SolverOptions, n: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 2.0 * omega_c0;
    let samples: Vec<(f64, f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.gen_range(PI / 12.0..=PI / 5.0),
                rng.gen_range(0.6..=15.0),
                if span > 0.0 { rng.gen_range(-span..=span) } else { 0.0 },
            )
        })
        .collect();
    let direct = DirectSolver { tol: opts.tol };
    let prop_opts = SolverOptions {
        method: "propagation".into(),
        ..opts.clone()
    };
    let start = DensityMatrix::diagonal(0.0, 1.0, 0.0)?;
    let points = samples
        .par_iter()
        .map(|&(theta, pump, wc)| {
            let params = base.with_theta(theta).with_pump(pump);
            let a = direct.solve(&params, wc)?;
            let b = propagate_with_stats(&params, wc, &start, &prop_opts)?;
            Ok(OraclePoint {
                theta,
                pump,
                omega_c: wc,
                max_abs_diff: a.max_abs_diff(&b.state),
                max_trace_drift: b.max_trace_drift,
                propagation_time: b.time,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs_diff = points.iter().map(|p| p.max_abs_diff).fold(0.0, f64::max);
    let max_trace_drift = points.iter().map(|p| p.max_trace_drift).fold(0.0, f64::max);
    Ok(OracleReport {
        seed,
        points,
        max_abs_diff,
        max_trace_drift,
        passed: max_abs_diff < ORACLE_TOL && max_trace_drift < TRACE_DRIFT_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingChecks {
    /// θ = π/2: the p-weighted term of ρ13⁽¹⁾ and ρ31⁽⁰⁾, ρ32⁽⁰⁾ are exactly zero.
    pub orthogonal_dipoles: bool,
    /// Ωc = 0: ρ13⁽¹⁾ is exactly zero.
    pub zero_coupling: bool,
}

pub fn vanishing_checks(base: &SystemParams) -> Result<VanishingChecks> {
    let f = first_order(&base.with_theta(PI / 2.0), 2.5)?;
    let zero = num_complex::Complex64::new(0.0, 0.0);
    Ok(VanishingChecks {
        orthogonal_dipoles: f.rho13_sgc == zero && f.zeroth.rho31 == zero && f.zeroth.rho32 == zero,
        zero_coupling: rho13_first_order(base, 0.0)? == zero,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateReport {
    pub oracle: OracleReport,
    pub analytic: DiscrepancyReport,
    pub vanishing: VanishingChecks,
}

/// Oracle equivalence, the closed-form discrepancy table over the four
/// dipole angles × three coupling strengths, and the exact-zero checks.
pub fn validate(cfg: &RunConfig) -> Result<ValidateReport> {
    let oracle = oracle_equivalence(&cfg.params, cfg.wave.omega_c0, &cfg.solver, ORACLE_POINTS, ORACLE_SEED)?;
    let mut params = Vec::new();
    let mut couplings = Vec::new();
    for theta in [PI / 12.0, PI / 10.0, PI / 7.0, PI / 5.0] {
        for wc in [1.0, 3.0, 5.0] {
            params.push(cfg.params.with_theta(theta));
            couplings.push(wc);
        }
    }
    let solver = SolverRegistry::builtin().create(&cfg.solver)?;
    Ok(ValidateReport {
        oracle,
        analytic: discrepancy_report(&params, &couplings, solver.as_ref())?,
        vanishing: vanishing_checks(&cfg.params)?,
    })
}
