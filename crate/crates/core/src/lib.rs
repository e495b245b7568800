//! Probe-absorption maps and atom-localization analysis for a three-level
//! Λ atom driven by two crossed standing waves, a weak probe and an
//! incoherent pump, including spontaneously generated coherence (SGC).
//!
//! The pipeline is: [`wave`] gives the local coupling amplitude, [`liouvillian`]
//! solves the density-matrix equations for the stationary state, [`absorption`]
//! turns ρ13 into χ″ over a grid, and [`analysis`] measures the localization
//! peak. [`analytic`] holds the first-order closed form used as a cross-check.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod absorption;
pub mod analysis;
pub mod analytic;
pub mod error;
pub mod io;
pub mod liouvillian;
pub mod model;
pub mod wave;

pub use error::{Error, Result};
pub use model::{DensityMatrix, GridSpec, StandingWaveConfig, SystemParams};
