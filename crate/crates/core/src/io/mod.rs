//! Config documents, shipped presets, artifact writers and the command runner
//! behind the `atomloc` binary.

mod config;
mod output;
mod presets;
mod run;

pub use config::{parse_config, AnalysisConfig, OutputConfig, RunConfig, SweepConfig};
pub use output::{
    contours_csv, heatmap_pgm, map_csv, read_map_csv, render_heatmap, to_json, write_atomic, write_contours_csv,
    write_json, write_map_csv,
};
pub use presets::{preset, preset_names, preset_text};
pub use run::{
    contour_sets, oracle_equivalence, run, validate, vanishing_checks, Command, OraclePoint, OracleReport,
    RunOutcome, ValidateReport, VanishingChecks, ORACLE_POINTS, ORACLE_SEED, ORACLE_TOL, TRACE_DRIFT_TOL,
};
