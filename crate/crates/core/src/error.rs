use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// `theta` is congruent to 0 or π, where the dipole alignment parameter is undefined.
    #[error("dipole angle theta = {theta} is congruent to 0 or pi; SGC parameter undefined")]
    DegenerateDipoleAngle { theta: f64 },

    #[error("invalid parameters: {}", join_violations(.0))]
    InvalidParams(Vec<Violation>),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid standing-wave configuration: {0}")]
    InvalidWave(String),

    #[error("invalid solver options: {0}")]
    InvalidSolverOptions(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("steady state is not unique (condition estimate {condition:e})")]
    NonUniqueSteadyState { condition: f64 },

    #[error("constrained solve left residual {residual:e} above tolerance")]
    InconsistentSteadyState { residual: f64 },

    #[error("propagation did not converge: residual {residual:e} at t = {time}")]
    NoConvergence { residual: f64, time: f64 },

    #[error("closed form undefined: denominator {name} vanishes")]
    SingularDenominator { name: &'static str },

    #[error("half-maximum level not bracketed along {axis} inside the window")]
    HalfLevelNotBracketed { axis: char },

    #[error("map has a degenerate value range (max = min = {value})")]
    DegenerateRange { value: f64 },

    #[error("solver failed at node (x = {x}, y = {y}): {source}")]
    AtNode {
        x: f64,
        y: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown steady-state solver '{0}'")]
    UnknownSolver(String),

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateDipoleAngle { .. } => "DegenerateDipoleAngle",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidWave(_) => "InvalidWave",
            Error::InvalidSolverOptions(_) => "InvalidSolverOptions",
            Error::InvalidDensityMatrix(_) => "InvalidDensityMatrix",
            Error::NonUniqueSteadyState { .. } => "NonUniqueSteadyState",
            Error::InconsistentSteadyState { .. } => "InconsistentSteadyState",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SingularDenominator { .. } => "SingularDenominator",
            Error::HalfLevelNotBracketed { .. } => "HalfLevelNotBracketed",
            Error::DegenerateRange { .. } => "DegenerateRange",
            Error::AtNode { .. } => "SolverErrorAtNode",
            Error::UnknownSolver(_) => "UnknownSolver",
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::Parse(_) => "ParseError",
            Error::Validation(_) => "ValidationError",
            Error::Contract(_) => "ContractViolation",
            Error::Io { .. } => "IoError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
