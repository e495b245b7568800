//! Linear generator of the density-matrix equations and its stationary state.
//!
//! The state is vectorized as `(ρ11, ρ22, ρ33, ρ12, ρ21, ρ13, ρ31, ρ23, ρ32)`
//! (see [`crate::model::STATE_ORDER`]). Only the ρ22, ρ33, ρ12, ρ13 and ρ23
//! rows are written out; the remaining coherence rows follow from ρⱼᵢ = ρᵢⱼ*
//! and the ρ11 row from trace conservation.

mod propagate;
mod solver;

pub use propagate::{propagate_to_steady, propagate_with_stats, rk4_propagator, PropagationOutcome};
pub use solver::{
    steady_state, DirectSolver, PropagationSolver, SolverFactory, SolverOptions, SolverRegistry,
    SteadyStateSolver,
};

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::Result;
use crate::model::{DensityMatrix, SystemParams, CONJUGATE_SLOT};

pub type Mat9 = SMatrix<Complex64, 9, 9>;
pub type Vec9 = SVector<Complex64, 9>;

pub(crate) const R11: usize = 0;
pub(crate) const R22: usize = 1;
pub(crate) const R33: usize = 2;
pub(crate) const R12: usize = 3;
pub(crate) const R21: usize = 4;
pub(crate) const R13: usize = 5;
pub(crate) const R31: usize = 6;
pub(crate) const R23: usize = 7;
pub(crate) const R32: usize = 8;

/// Generator `L` of `dρ/dt = L·vec(ρ)` for one fixed coupling amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    m: Mat9,
}

impl GeneratorMatrix {
    pub fn matrix(&self) -> &Mat9 {
        &self.m
    }

    pub fn apply(&self, v: &[Complex64; 9]) -> [Complex64; 9] {
        let out = self.m * Vec9::from_column_slice(v);
        let mut a = [Complex64::new(0.0, 0.0); 9];
        a.copy_from_slice(out.as_slice());
        a
    }

    /// Entry `(row, col)` in the vectorized ordering.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }
}

/// Builds the generator for `params` at local coupling Rabi frequency `omega_c`.
pub fn build_generator(params: &SystemParams, omega_c: f64) -> Result<GeneratorMatrix> {
    let params = params.validated()?;
    let p = params.p()?;
    Ok(build_generator_with_alignment(&params, p, omega_c))
}

/// Same as [`build_generator`] but with the alignment parameter `p` supplied
/// directly, bypassing θ. Parameters are not validated.
pub fn build_generator_with_alignment(params: &SystemParams, p: f64, omega_c: f64) -> GeneratorMatrix {
    let i = Complex64::i();
    let c = |x: f64| Complex64::new(x, 0.0);
    let (g1, g2, pump) = (params.gamma1, params.gamma2, params.pump);
    let (wc, wp) = (omega_c, params.omega_p);
    let mut m = Mat9::zeros();

    m[(R22, R11)] += c(2.0 * g2);
    m[(R22, R12)] += i * wc;
    m[(R22, R21)] -= i * wc;

    m[(R33, R11)] += c(2.0 * g1);
    m[(R33, R33)] -= c(2.0 * pump);
    m[(R33, R13)] += i * wp;
    m[(R33, R31)] -= i * wp;

    m[(R12, R12)] -= Complex64::new(g1 + g2, params.delta_c);
    m[(R12, R32)] += i * wp;
    m[(R12, R11)] -= i * wc;
    m[(R12, R22)] += i * wc;

    m[(R13, R13)] -= Complex64::new(g1 + g2 + pump, params.delta_p);
    m[(R13, R23)] += i * wc;
    m[(R13, R11)] -= i * wp;
    m[(R13, R33)] += i * wp;

    m[(R23, R23)] -= Complex64::new(pump, params.delta_p - params.delta_c);
    m[(R23, R11)] += c(2.0 * p * (g1 * g2).sqrt());
    m[(R23, R13)] += i * wc;
    m[(R23, R21)] -= i * wp;

    for (src, dst) in [(R12, R21), (R13, R31), (R23, R32)] {
        for col in 0..9 {
            m[(dst, CONJUGATE_SLOT[col])] = m[(src, col)].conj();
        }
    }

    for col in 0..9 {
        m[(R11, col)] = -(m[(R22, col)] + m[(R33, col)]);
    }

    GeneratorMatrix { m }
}

/// Max-norm of `L·vec(ρ)`.
pub fn residual_norm(generator: &GeneratorMatrix, rho: &DensityMatrix) -> f64 {
    residual_norm_vec(generator, &rho.to_vector())
}

pub fn residual_norm_vec(generator: &GeneratorMatrix, v: &[Complex64; 9]) -> f64 {
    generator.apply(v).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
