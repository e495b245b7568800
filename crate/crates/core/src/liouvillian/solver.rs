use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_generator, propagate_to_steady, residual_norm_vec, Mat9, Vec9, R11};
use crate::error::{Error, Result};
use crate::model::{DensityMatrix, SystemParams};

/// 1-norm condition estimate above which the constrained system is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    /// Registered solver name, see [`SolverRegistry::builtin`].
    #[serde(default = "default_method")]
    pub method: String,
    /// Max-norm residual tolerance on `L·ρ`.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Propagation horizon in units of 1/γ.
    #[serde(default = "default_max_time")]
    pub max_time: f64,
    /// Fixed propagation step in units of 1/γ.
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_method() -> String {
    DirectSolver::NAME.to_string()
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_time() -> f64 {
    2000.0
}
fn default_dt() -> f64 {
    1e-3
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: default_method(),
            tol: default_tol(),
            max_time: default_max_time(),
            dt: default_dt(),
        }
    }
}

impl SolverOptions {
    pub fn propagation() -> Self {
        SolverOptions {
            method: PropagationSolver::NAME.to_string(),
            ..Self::default()
        }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        SolverOptions { tol, ..self }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.tol > 0.0) {
            out.push(format!("tol: requires tol > 0 (got {})", self.tol));
        }
        if !(self.dt > 0.0) {
            out.push(format!("dt: requires dt > 0 (got {})", self.dt));
        }
        if !(self.max_time > self.dt) {
            out.push(format!(
                "max_time: requires max_time > dt (got {} <= {})",
                self.max_time, self.dt
            ));
        }
        out
    }

    pub fn validated(&self) -> Result<&Self> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidSolverOptions(v.join("; ")))
        }
    }
}

/// A method for finding the stationary state of the generator at one coupling amplitude.
pub trait SteadyStateSolver: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn solve(&self, params: &SystemParams, omega_c: f64) -> Result<DensityMatrix>;
}

/// Constrained dense solve: the ρ11 row of `L` is replaced by the trace row.
#[derive(Debug, Clone)]
pub struct DirectSolver {
    pub tol: f64,
}

impl DirectSolver {
    pub const NAME: &'static str = "direct";
}

impl SteadyStateSolver for DirectSolver {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn solve(&self, params: &SystemParams, omega_c: f64) -> Result<DensityMatrix> {
        let generator = build_generator(params, omega_c)?;
        let mut a: Mat9 = *generator.matrix();
        for col in 0..9 {
            a[(R11, col)] = if col < 3 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let mut rhs = Vec9::zeros();
        rhs[R11] = Complex64::new(1.0, 0.0);

        let lu = a.lu();
        let inverse = lu
            .try_inverse()
            .ok_or(Error::NonUniqueSteadyState { condition: f64::INFINITY })?;
        let condition = norm1(&a) * norm1(&inverse);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::NonUniqueSteadyState { condition });
        }
        let x = lu
            .solve(&rhs)
            .ok_or(Error::NonUniqueSteadyState { condition: f64::INFINITY })?;
        let mut v = [Complex64::new(0.0, 0.0); 9];
        v.copy_from_slice(x.as_slice());

        // The dropped ρ11 equation must still hold.
        let residual = residual_norm_vec(&generator, &v);
        if !(residual < self.tol) {
            return Err(Error::InconsistentSteadyState { residual });
        }
        DensityMatrix::from_vector(&v)
    }
}

fn norm1(m: &Mat9) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Fixed-step RK4 integration from `initial` until the residual drops below tolerance.
#[derive(Debug, Clone)]
pub struct PropagationSolver {
    pub opts: SolverOptions,
    pub initial: DensityMatrix,
}

impl PropagationSolver {
    pub const NAME: &'static str = "propagation";

    /// Starts from the metastable state |2⟩⟨2|.
    pub fn new(opts: SolverOptions) -> Self {
        PropagationSolver {
            opts,
            initial: DensityMatrix::diagonal(0.0, 1.0, 0.0).expect("valid diagonal state"),
        }
    }
}

impl SteadyStateSolver for PropagationSolver {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn solve(&self, params: &SystemParams, omega_c: f64) -> Result<DensityMatrix> {
        propagate_to_steady(params, omega_c, &self.initial, &self.opts)
    }
}

pub type SolverFactory = fn(&SolverOptions) -> Box<dyn SteadyStateSolver>;

/// Name → constructor table for steady-state solvers.
#[derive(Clone)]
pub struct SolverRegistry {
    entries: BTreeMap<String, SolverFactory>,
}

impl fmt::Debug for SolverRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

impl SolverRegistry {
    pub fn empty() -> Self {
        SolverRegistry {
            entries: BTreeMap::new(),
        }
    }

    /// `direct` (alias `direct-linear-solve`) and `propagation` (alias `time-propagation`).
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        let direct: SolverFactory = |o| Box::new(DirectSolver { tol: o.tol });
        let propagation: SolverFactory = |o| Box::new(PropagationSolver::new(o.clone()));
        r.register(DirectSolver::NAME, direct);
        r.register("direct-linear-solve", direct);
        r.register(PropagationSolver::NAME, propagation);
        r.register("time-propagation", propagation);
        r
    }

    pub fn register(&mut self, name: &str, factory: SolverFactory) {
        self.entries.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    /// Instantiates the solver named by `opts.method`.
    pub fn create(&self, opts: &SolverOptions) -> Result<Box<dyn SteadyStateSolver>> {
        opts.validated()?;
        let factory = self
            .entries
            .get(&opts.method)
            .ok_or_else(|| Error::UnknownSolver(opts.method.clone()))?;
        Ok(factory(opts))
    }
}

/// Stationary state at coupling `omega_c` using the solver selected in `opts`.
pub fn steady_state(params: &SystemParams, omega_c: f64, opts: &SolverOptions) -> Result<DensityMatrix> {
    SolverRegistry::builtin().create(opts)?.solve(params, omega_c)
}
