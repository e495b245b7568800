//! Position-dependent coupling Rabi frequency of two crossed standing waves.

use crate::model::{GridSpec, StandingWaveConfig};

/// `Ωc0 · [sin(κ₁x + δ) + sin(κ₂y + η)]`. The result is signed.
pub fn rabi_at(cfg: &StandingWaveConfig, x: f64, y: f64) -> f64 {
    cfg.omega_c0 * ((cfg.kappa1 * x + cfg.delta_phase).sin() + (cfg.kappa2 * y + cfg.eta_phase).sin())
}

/// Rabi amplitude at every grid node, indexed `[i * ny + j]` for node `(x_i, y_j)`.
pub fn field_on_grid(cfg: &StandingWaveConfig, grid: &GridSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.nx {
        let x = grid.x(i);
        for j in 0..grid.ny {
            out.push(rabi_at(cfg, x, grid.y(j)));
        }
    }
    out
}
