use num_complex::Complex64;

use super::{build_generator, residual_norm_vec, GeneratorMatrix, Mat9, Vec9};
use crate::error::{Error, Result};
use crate::model::{DensityMatrix, SystemParams};

const CHECK_EVERY: usize = 100;

#[derive(Debug, Clone)]
pub struct PropagationOutcome {
    pub state: DensityMatrix,
    /// Time at which the residual first fell below tolerance.
    pub time: f64,
    pub steps: usize,
    pub residual: f64,
    /// Largest |tr ρ − 1| seen at any residual check.
    pub max_trace_drift: f64,
}

/// One classical RK4 step for the linear system `dv/dt = L·v` as a matrix:
/// `I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24`.
pub fn rk4_propagator(generator: &GeneratorMatrix, dt: f64) -> Mat9 {
    let hl = generator.matrix() * Complex64::new(dt, 0.0);
    let id = Mat9::identity();
    let quarter = Complex64::new(0.25, 0.0);
    let third = Complex64::new(1.0 / 3.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let inner = id + hl * quarter;
    let inner = id + (hl * third) * inner;
    let inner = id + (hl * half) * inner;
    id + hl * inner
}

/// Integrates from `rho0` until `max|L·ρ| < opts.tol`.
pub fn propagate_to_steady(
    params: &SystemParams,
    omega_c: f64,
    rho0: &DensityMatrix,
    opts: &super::SolverOptions,
) -> Result<DensityMatrix> {
    propagate_with_stats(params, omega_c, rho0, opts).map(|o| o.state)
}

pub fn propagate_with_stats(
    params: &SystemParams,
    omega_c: f64,
    rho0: &DensityMatrix,
    opts: &super::SolverOptions,
) -> Result<PropagationOutcome> {
    opts.validated()?;
    rho0.check()?;
    let generator = build_generator(params, omega_c)?;
    let step = rk4_propagator(&generator, opts.dt);
    let max_steps = (opts.max_time / opts.dt).ceil() as usize;

    let mut v = Vec9::from_column_slice(&rho0.to_vector());
    let mut steps = 0usize;
    let mut drift: f64 = 0.0;
    loop {
        let mut arr = [Complex64::new(0.0, 0.0); 9];
        arr.copy_from_slice(v.as_slice());
        let residual = residual_norm_vec(&generator, &arr);
        drift = drift.max((arr[0] + arr[1] + arr[2] - 1.0).norm());
        let time = steps as f64 * opts.dt;
        if residual < opts.tol {
            return Ok(PropagationOutcome {
                state: DensityMatrix::from_vector(&arr)?,
                time,
                steps,
                residual,
                max_trace_drift: drift,
            });
        }
        if steps >= max_steps {
            return Err(Error::NoConvergence { residual, time });
        }
        for _ in 0..CHECK_EVERY.min(max_steps - steps) {
            v = step * v;
            steps += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::{steady_state, SolverOptions};
    use std::f64::consts::PI;

    fn fields_off(pump: f64) -> SystemParams {
        SystemParams {
            pump,
            omega_p: 0.0,
            ..SystemParams::fig2_base()
        }
    }

    #[test]
    fn stationary_start_returns_unchanged() {
        let rho0 = DensityMatrix::diagonal(0.0, 1.0, 0.0).unwrap();
        let out =
            propagate_with_stats(&fields_off(0.6), 0.0, &rho0, &SolverOptions::propagation()).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.state, rho0);
    }

    #[test]
    fn unpumped_decay_splits_by_branching_ratio() {
        let rho0 = DensityMatrix::diagonal(1.0, 0.0, 0.0).unwrap();
        let rho = propagate_to_steady(
            &fields_off(0.0).with_theta(PI / 2.0),
            0.0,
            &rho0,
            &SolverOptions::propagation(),
        )
        .unwrap();
        let [p1, p2, p3] = rho.populations();
        assert!(p1.abs() < 1e-10);
        assert!((p2 - 0.5).abs() < 1e-10);
        assert!((p3 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_direct_solve_at_fig2_point() {
        let params = SystemParams::fig2_base();
        let rho0 = DensityMatrix::diagonal(0.0, 1.0, 0.0).unwrap();
        let out = propagate_with_stats(&params, 5.0, &rho0, &SolverOptions::propagation()).unwrap();
        let direct = steady_state(&params, 5.0, &SolverOptions::default()).unwrap();
        assert!(out.state.max_abs_diff(&direct) < 1e-8);
        assert!(out.max_trace_drift < 1e-9);
    }

    #[test]
    fn horizon_exhaustion_is_reported() {
        let opts = SolverOptions {
            max_time: 0.5,
            ..SolverOptions::propagation()
        };
        let rho0 = DensityMatrix::diagonal(1.0, 0.0, 0.0).unwrap();
        let err = propagate_to_steady(&SystemParams::fig2_base(), 5.0, &rho0, &opts).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }
}
