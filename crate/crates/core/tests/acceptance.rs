//! One test per acceptance criterion. Each writes a single
//! `PASS|FAIL criterion N: ...` line straight to stdout (visible without
//! `--nocapture`) and then asserts the criterion.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use atomloc::absorption::{compute_map, sweep_gamma, sweep_theta, AbsorptionMap, SweepOptions, SweepResult};
use atomloc::io::{oracle_equivalence, preset, ORACLE_POINTS, ORACLE_SEED};
use atomloc::liouvillian::{DirectSolver, SolverOptions, SteadyStateSolver};
use atomloc::model::{GridSpec, StandingWaveConfig, SystemParams};
use atomloc::wave::rabi_at;

const THETAS: [f64; 4] = [PI / 12.0, PI / 10.0, PI / 7.0, PI / 5.0];
const THETA_HEIGHTS: [f64; 4] = [0.10, 0.20, 0.4, 1.0];
const PUMPS: [f64; 4] = [2.5, 4.0, 12.0, 15.0];
const PUMP_HEIGHTS: [f64; 4] = [0.8, 0.6, 0.3, 0.2];
const HEIGHT_REL_TOL: f64 = 0.30;
const RUNTIME_BUDGET: Duration = Duration::from_secs(60);

fn report(n: u32, pass: bool, detail: String) {
    let line = format!("\n{} criterion {n}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {n}: {detail}");
}

fn base() -> SystemParams {
    SystemParams::fig2_base()
}

fn solver() -> DirectSolver {
    DirectSolver { tol: 1e-10 }
}

struct Sweeps {
    theta: SweepResult,
    theta_time: Duration,
    pump: SweepResult,
    pump_time: Duration,
}

fn sweeps() -> &'static Sweeps {
    static CELL: OnceLock<Sweeps> = OnceLock::new();
    CELL.get_or_init(|| {
        let (wave, grid, opts) = (StandingWaveConfig::fig2(), GridSpec::default_window(), SweepOptions::default());
        let t = Instant::now();
        let theta = sweep_theta(&base(), &wave, &grid, &THETAS, &solver(), &opts).unwrap();
        let theta_time = t.elapsed();
        let t = Instant::now();
        let pump = sweep_gamma(&base(), &wave, &grid, &PUMPS, &solver(), &opts).unwrap();
        let pump_time = t.elapsed();
        Sweeps {
            theta,
            theta_time,
            pump,
            pump_time,
        }
    })
}

fn peak_counts(r: &SweepResult) -> Vec<usize> {
    r.summaries.iter().map(|s| s.report.peak_count).collect()
}

fn heights(r: &SweepResult) -> Vec<f64> {
    r.peak_heights().into_iter().map(|h| h.unwrap_or(f64::NAN)).collect()
}

fn within(values: &[f64], reference: &[f64], rel: f64) -> bool {
    values.iter().zip(reference).all(|(v, r)| (v - r).abs() <= rel * r)
}

fn strictly(values: &[f64], increasing: bool) -> bool {
    values
        .windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

#[test]
fn criterion_1_theta_sweep() {
    let s = sweeps();
    let counts = peak_counts(&s.theta);
    let h = heights(&s.theta);
    let one_peak = counts.iter().all(|&c| c == 1);
    let increasing = strictly(&h, true);
    let close = within(&h, &THETA_HEIGHTS, HEIGHT_REL_TOL);
    let fast = s.theta_time < RUNTIME_BUDGET;
    report(
        1,
        one_peak && increasing && close && fast,
        format!(
            "peaks per map {counts:?}; heights {} vs reference {} (±30%): increasing={increasing}, within={close}; runtime {:.2?}",
            fmt(&h),
            fmt(&THETA_HEIGHTS),
            s.theta_time
        ),
    );
}

#[test]
fn criterion_2_pump_sweep() {
    let s = sweeps();
    let counts = peak_counts(&s.pump);
    let h = heights(&s.pump);
    let d: Vec<f64> = s.pump.diameters().into_iter().map(|d| d.unwrap_or(f64::NAN)).collect();
    let one_peak = counts.iter().all(|&c| c == 1);
    let decreasing = strictly(&h, false);
    let close = within(&h, &PUMP_HEIGHTS, HEIGHT_REL_TOL);
    let shrinking = strictly(&d, false);
    let fast = s.pump_time < RUNTIME_BUDGET;
    report(
        2,
        one_peak && decreasing && close && shrinking && fast,
        format!(
            "peaks per map {counts:?}; heights {} vs reference {} (±30%): decreasing={decreasing}, within={close}; FWHM diameters {} shrinking={shrinking}; runtime {:.2?}",
            fmt(&h),
            fmt(&PUMP_HEIGHTS),
            fmt(&d),
            s.pump_time
        ),
    );
}

#[test]
fn criterion_3_half_wavelength_localization() {
    let s = sweeps();
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, r) in [("theta", &s.theta), ("pump", &s.pump)] {
        for (v, summary) in r.values.iter().zip(&r.summaries) {
            match summary.report.peaks.first() {
                Some(p) => match p.diameter {
                    Some(d) => {
                        pass &= d < 6.0;
                        lines.push(format!("{name}={v:.4}: {d:.3}"));
                    }
                    None => {
                        pass = false;
                        lines.push(format!("{name}={v:.4}: undefined ({})", p.fwhm_error.as_deref().unwrap_or("?")));
                    }
                },
                None => {
                    pass = false;
                    lines.push(format!("{name}={v:.4}: no peak"));
                }
            }
        }
    }
    report(3, pass, format!("max(fwhm_x, fwhm_y) < 6: {}", lines.join("; ")));
}

#[test]
fn criterion_4_oracle_equivalence() {
    let r = oracle_equivalence(&base(), 2.5, &SolverOptions::default(), ORACLE_POINTS, ORACLE_SEED).unwrap();
    let pass = r.points.len() >= 20 && r.max_abs_diff < 1e-8 && r.max_trace_drift < 1e-9;
    report(
        4,
        pass,
        format!(
            "{} points, max entrywise |direct - RK4| = {:.3e} (< 1e-8), max trace drift = {:.3e} (< 1e-9)",
            r.points.len(),
            r.max_abs_diff,
            r.max_trace_drift
        ),
    );
}

#[test]
fn criterion_5_physicality() {
    let wave = StandingWaveConfig::fig2();
    let grid = GridSpec::default_window();
    let mut params = Vec::new();
    params.extend(THETAS.iter().map(|&t| base().with_theta(t)));
    params.extend(PUMPS.iter().map(|&g| base().with_pump(g)));
    let nodes: Vec<(f64, f64)> = (0..grid.nx)
        .flat_map(|i| (0..grid.ny).map(move |j| (i, j)))
        .map(|(i, j)| (grid.x(i), grid.y(j)))
        .collect();
    let solver = solver();
    let (mut herm, mut trace, mut eig) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut count = 0usize;
    for p in &params {
        let worst = nodes
            .par_iter()
            .map(|&(x, y)| {
                let rho = solver.solve(p, rabi_at(&wave, x, y)).unwrap();
                (
                    rho.hermiticity_error(),
                    (rho.trace() - 1.0).norm(),
                    rho.eigenvalues()[0],
                )
            })
            .reduce(
                || (0.0, 0.0, f64::INFINITY),
                |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.min(b.2)),
            );
        herm = herm.max(worst.0);
        trace = trace.max(worst.1);
        eig = eig.min(worst.2);
        count += nodes.len();
    }
    let pass = herm <= 1e-10 && trace <= 1e-10 && eig >= -1e-8;
    report(
        5,
        pass,
        format!("{count} states: max hermiticity error {herm:.3e}, max |tr - 1| {trace:.3e}, min eigenvalue {eig:.3e}"),
    );
}

#[test]
fn criterion_6_linear_response() {
    let wave = StandingWaveConfig::fig2();
    let grid = GridSpec::default_window();
    let a = compute_map(&base(), &wave, &grid, &solver()).unwrap();
    let b = compute_map(&base().with_omega_p(0.001), &wave, &grid, &solver()).unwrap();
    let rel = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (y - x).abs() / x.abs())
        .fold(0.0f64, f64::max);
    report(
        6,
        rel < 0.01,
        format!(
            "max relative change of χ″ from Ωp = 0.01 to 0.001 is {:.3}% (< 1%); peak {:.4} -> {:.4}",
            100.0 * rel,
            a.max(),
            b.max()
        ),
    );
}

fn transpose_error(m: &AbsorptionMap) -> f64 {
    let n = m.grid.nx;
    assert_eq!(n, m.grid.ny);
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (m.get(i, j) - m.get(j, i)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_7_symmetry_and_periodicity() {
    let wave = StandingWaveConfig::fig2();
    let grid = GridSpec::default_window();
    let p = base();
    let m = compute_map(&p, &wave, &grid, &solver()).unwrap();
    let shifted = compute_map(&p, &wave, &grid.translated(wave.period_x(), 0.0), &solver()).unwrap();
    let sym = transpose_error(&m);
    let per = m
        .values
        .iter()
        .zip(&shifted.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    report(
        7,
        sym < 1e-8 && per < 1e-8,
        format!(
            "transpose asymmetry {sym:.3e} (< 1e-8); shift by {} in x changes map by {per:.3e} (< 1e-8)",
            wave.period_x()
        ),
    );
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_atomloc")
}

#[test]
fn criterion_8_analytic_harness() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(bin())
        .args(["validate", "--preset", "fig2d", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    let text = std::fs::read_to_string(dir.path().join("atomloc_validate.json")).unwrap_or_default();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap_or(serde_json::Value::Null);
    let points = json["analytic"]["points"].as_array().map_or(0, Vec::len);
    let p0 = json["vanishing"]["orthogonal_dipoles"] == true;
    let wc0 = json["vanishing"]["zero_coupling"] == true;
    let pass = out.status.success() && points >= 10 && p0 && wc0;
    report(
        8,
        pass,
        format!(
            "validate exit {:?}; {points} closed-form points; p = 0 vanishing {p0}, Ωc = 0 vanishing {wc0}; \
             reported only: max |Δχ″| {}, max relative {}",
            out.status.code(),
            json["analytic"]["max_abs_diff_im"],
            json["analytic"]["max_rel_diff_im"]
        ),
    );
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "config.toml")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn criterion_9_determinism() {
    let mut cfg = preset("fig2d").unwrap();
    cfg.output.heatmaps = true;
    let root = tempfile::tempdir().unwrap();
    let cfg_path = root.path().join("config.toml");
    std::fs::write(&cfg_path, cfg.to_toml()).unwrap();

    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let dir = root.path().join(format!("t{threads}"));
        for cmd in ["sweep-theta", "map"] {
            let status = Command::new(bin())
                .args([cmd, "--threads", threads, "--config"])
                .arg(&cfg_path)
                .arg("--out")
                .arg(&dir)
                .status()
                .unwrap();
            assert!(status.success());
        }
        outputs.push(files(&dir));
    }
    let names: Vec<&str> = outputs[0].iter().map(|(n, _)| n.as_str()).collect();
    let kinds = ["csv", "json", "pgm"].iter().all(|k| names.iter().any(|n| n.ends_with(k)));
    let identical = outputs[0] == outputs[1];
    report(
        9,
        identical && kinds,
        format!("{} files (CSV/JSON/PGM) byte-identical with 1 and 8 workers: {identical}", names.len()),
    );
}
