//! Parameter and state types shared by the rest of the crate.
//!
//! All rates and detunings are expressed in units of the reference decay rate
//! γ. Decay and pump rates are stored as half-rates (γ₁, γ₂, Γ); the factor of
//! two appears in the generator. Positions are dimensionless plot units, one
//! standing-wave period spanning `2π/κ` units.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ANGLE_EPS: f64 = 1e-12;
const ORTHOGONAL_EPS: f64 = 1e-15;

/// Hermiticity, trace and diagonal-reality tolerance for [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-10;
/// Slack allowed on populations outside `[0, 1]`.
pub const POPULATION_SLACK: f64 = 1e-8;

/// Rates, detunings and angles of the three-level system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Half-rate γ₁ of the decay |1⟩ → |3⟩.
    pub gamma1: f64,
    /// Half-rate γ₂ of the decay |1⟩ → |2⟩.
    pub gamma2: f64,
    /// Incoherent pump half-rate Γ on |3⟩ → |1⟩.
    pub pump: f64,
    /// Probe detuning Δp.
    pub delta_p: f64,
    /// Coupling detuning Δc.
    pub delta_c: f64,
    /// Probe Rabi frequency Ωp.
    pub omega_p: f64,
    /// Angle between the two transition dipoles, in radians.
    pub theta: f64,
    /// Susceptibility prefactor.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    1.0
}

impl SystemParams {
    /// Base point of the θ sweep: Γ = 0.6, Δc = −10, Δp = 0, Ωp = 0.01, θ = π/5.
    pub fn fig2_base() -> Self {
        SystemParams {
            gamma1: 1.0,
            gamma2: 1.0,
            pump: 0.6,
            delta_p: 0.0,
            delta_c: -10.0,
            omega_p: 0.01,
            theta: PI / 5.0,
            alpha: 1.0,
        }
    }

    /// Dipole alignment parameter `p = cos θ`.
    pub fn p(&self) -> Result<f64> {
        p_from_theta(self.theta)
    }

    pub fn with_theta(self, theta: f64) -> Self {
        SystemParams { theta, ..self }
    }

    pub fn with_pump(self, pump: f64) -> Self {
        SystemParams { pump, ..self }
    }

    pub fn with_omega_p(self, omega_p: f64) -> Self {
        SystemParams { omega_p, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        SystemParams { alpha, ..self }
    }

    /// Returns `self` if valid, otherwise the full list of violations.
    pub fn validated(self) -> Result<Self> {
        let v = validate(&self);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}

/// A single violated parameter invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub rule: &'static str,
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: requires {} (got {})", self.field, self.rule, self.value)
    }
}

fn is_degenerate_angle(theta: f64) -> bool {
    let t = theta.rem_euclid(TAU);
    t.abs() < ANGLE_EPS || (t - PI).abs() < ANGLE_EPS || (TAU - t).abs() < ANGLE_EPS
}

/// `p = cos θ`, rejecting the excluded alignments θ ≡ 0 and θ ≡ π.
///
/// The cosine rounding residue at θ = π/2 (about 6e-17) is returned as exactly 0.
pub fn p_from_theta(theta: f64) -> Result<f64> {
    if !theta.is_finite() || is_degenerate_angle(theta) {
        return Err(Error::DegenerateDipoleAngle { theta });
    }
    let p = theta.cos();
    Ok(if p.abs() < ORTHOGONAL_EPS { 0.0 } else { p })
}

/// Collects every violated invariant of `params`. An empty list means valid.
pub fn validate(params: &SystemParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut check = |ok: bool, field, rule, value| {
        if !ok {
            out.push(Violation { field, rule, value });
        }
    };
    // NaN fails every comparison, so it is reported too.
    check(params.gamma1 > 0.0, "gamma1", "gamma1 > 0", params.gamma1);
    check(params.gamma2 > 0.0, "gamma2", "gamma2 > 0", params.gamma2);
    check(params.pump >= 0.0, "pump", "pump >= 0", params.pump);
    check(params.omega_p >= 0.0, "omega_p", "omega_p >= 0", params.omega_p);
    check(params.alpha > 0.0, "alpha", "alpha > 0", params.alpha);
    check(params.delta_p.is_finite(), "delta_p", "finite", params.delta_p);
    check(params.delta_c.is_finite(), "delta_c", "finite", params.delta_c);
    check(
        params.theta.is_finite() && !is_degenerate_angle(params.theta),
        "theta",
        "theta not congruent to 0 or pi",
        params.theta,
    );
    out
}

/// Amplitude, wave vectors and phases of the two crossed standing waves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandingWaveConfig {
    pub omega_c0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub delta_phase: f64,
    pub eta_phase: f64,
}

impl StandingWaveConfig {
    /// Ωc0 = 2.5, κ₁ = κ₂ = π/6, δ = η = π/2.
    pub fn fig2() -> Self {
        StandingWaveConfig {
            omega_c0: 2.5,
            kappa1: PI / 6.0,
            kappa2: PI / 6.0,
            delta_phase: PI / 2.0,
            eta_phase: PI / 2.0,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.kappa1 > 0.0) {
            out.push(format!("kappa1: requires kappa1 > 0 (got {})", self.kappa1));
        }
        if !(self.kappa2 > 0.0) {
            out.push(format!("kappa2: requires kappa2 > 0 (got {})", self.kappa2));
        }
        if !(self.omega_c0 >= 0.0) {
            out.push(format!("omega_c0: requires omega_c0 >= 0 (got {})", self.omega_c0));
        }
        if !(self.delta_phase.is_finite() && self.eta_phase.is_finite()) {
            out.push("phases must be finite".to_string());
        }
        out
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidWave(v.join("; ")))
        }
    }

    /// Spatial period along x, `2π/κ₁`.
    pub fn period_x(&self) -> f64 {
        TAU / self.kappa1
    }

    pub fn period_y(&self) -> f64 {
        TAU / self.kappa2
    }

    /// Half of the x standing-wave wavelength, `π/κ₁`.
    pub fn half_wavelength(&self) -> f64 {
        PI / self.kappa1
    }
}

/// Rectangular window sampled on a uniform node lattice, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, nx: usize, ny: usize) -> Result<Self> {
        GridSpec {
            xmin,
            xmax,
            ymin,
            ymax,
            nx,
            ny,
        }
        .validated()
    }

    /// The `[-2, 2]²` window at 201×201 nodes.
    pub fn default_window() -> Self {
        GridSpec {
            xmin: -2.0,
            xmax: 2.0,
            ymin: -2.0,
            ymax: 2.0,
            nx: 201,
            ny: 201,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.nx < 2 {
            out.push(format!("nx: requires nx >= 2 (got {})", self.nx));
        }
        if self.ny < 2 {
            out.push(format!("ny: requires ny >= 2 (got {})", self.ny));
        }
        if !(self.xmax > self.xmin) || !self.xmin.is_finite() || !self.xmax.is_finite() {
            out.push(format!("x range: requires xmax > xmin (got [{}, {}])", self.xmin, self.xmax));
        }
        if !(self.ymax > self.ymin) || !self.ymin.is_finite() || !self.ymax.is_finite() {
            out.push(format!("y range: requires ymax > ymin (got [{}, {}])", self.ymin, self.ymax));
        }
        out
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidGrid(v.join("; ")))
        }
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.ymax - self.ymin) / (self.ny - 1) as f64
    }

    /// x coordinate of node column `i`; the last node is exactly `xmax`.
    pub fn x(&self, i: usize) -> f64 {
        node(self.xmin, self.xmax, self.nx, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        node(self.ymin, self.ymax, self.ny, j)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax
    }

    /// Same lattice shifted by `(sx, sy)`.
    pub fn translated(&self, sx: f64, sy: f64) -> Self {
        GridSpec {
            xmin: self.xmin + sx,
            xmax: self.xmax + sx,
            ymin: self.ymin + sy,
            ymax: self.ymax + sy,
            ..*self
        }
    }
}

fn node(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
    }
}

/// Index of each density-matrix element in the vectorized state.
///
/// The order `(ρ11, ρ22, ρ33, ρ12, ρ21, ρ13, ρ31, ρ23, ρ32)` is part of the
/// public contract of [`crate::liouvillian::GeneratorMatrix`].
pub const STATE_ORDER: [(usize, usize); 9] = [
    (0, 0),
    (1, 1),
    (2, 2),
    (0, 1),
    (1, 0),
    (0, 2),
    (2, 0),
    (1, 2),
    (2, 1),
];

/// Vector index of the element conjugate to each slot under ρᵢⱼ ↔ ρⱼᵢ.
pub const CONJUGATE_SLOT: [usize; 9] = [0, 1, 2, 4, 3, 6, 5, 8, 7];

/// 3×3 density matrix in the bare basis {|1⟩, |2⟩, |3⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Matrix3<Complex64>,
}

impl DensityMatrix {
    /// Builds a state and checks Hermiticity, unit trace and population bounds.
    pub fn from_vector(v: &[Complex64; 9]) -> Result<Self> {
        let rho = Self::from_vector_unchecked(v);
        rho.check()?;
        Ok(rho)
    }

    pub(crate) fn from_vector_unchecked(v: &[Complex64; 9]) -> Self {
        let mut m = Matrix3::zeros();
        for (k, &(i, j)) in STATE_ORDER.iter().enumerate() {
            m[(i, j)] = v[k];
        }
        DensityMatrix { m }
    }

    /// Diagonal state with the given real populations.
    pub fn diagonal(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let z = Complex64::new(0.0, 0.0);
        Self::from_vector(&[p1.into(), p2.into(), p3.into(), z, z, z, z, z, z])
    }

    pub fn to_vector(&self) -> [Complex64; 9] {
        let mut v = [Complex64::new(0.0, 0.0); 9];
        for (k, &(i, j)) in STATE_ORDER.iter().enumerate() {
            v[k] = self.m[(i, j)];
        }
        v
    }

    /// Element ρᵢⱼ with 1-based level labels, matching the |1⟩, |2⟩, |3⟩ notation.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i - 1, j - 1)]
    }

    pub fn rho13(&self) -> Complex64 {
        self.get(1, 3)
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.m[(0, 0)].re, self.m[(1, 1)].re, self.m[(2, 2)].re]
    }

    /// Largest |ρᵢⱼ − conj(ρⱼᵢ)|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                e = e.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        e
    }

    /// Largest entrywise |ρᵢⱼ − σᵢⱼ|.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let h = (self.m + self.m.adjoint()) * Complex64::new(0.5, 0.0);
        let ev = h.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2]];
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }

    pub fn check(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if !(herm <= STATE_TOL) {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (error {herm:e})"
            )));
        }
        let tr = self.trace();
        if !((tr - 1.0).norm() <= STATE_TOL) {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        for i in 0..3 {
            let d = self.m[(i, i)];
            if !(d.im.abs() <= STATE_TOL) {
                return Err(Error::InvalidDensityMatrix(format!(
                    "diagonal entry {} has imaginary part {:e}",
                    i + 1,
                    d.im
                )));
            }
            if !(d.re >= -POPULATION_SLACK && d.re <= 1.0 + POPULATION_SLACK) {
                return Err(Error::InvalidDensityMatrix(format!(
                    "population {} = {} outside [0, 1]",
                    i + 1,
                    d.re
                )));
            }
        }
        Ok(())
    }
}
