use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use atomloc::io::{parse_config, preset, run, Command, RunConfig};
use atomloc::{Error, Result};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// χ″ grid CSV plus a JSON peak report.
    Map,
    /// One map per dipole angle in [sweep].thetas, plus a JSON summary.
    SweepTheta,
    /// One map per pump rate in [sweep].pumps, plus a JSON summary.
    SweepGamma,
    /// Iso-line polylines at [analysis].contour_fractions of the maximum.
    Contours,
    /// Solver oracle, closed-form discrepancy table and exact-zero checks.
    Validate,
    /// Grayscale PGM raster of the map.
    Render,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Map => Command::Map,
            Cmd::SweepTheta => Command::SweepTheta,
            Cmd::SweepGamma => Command::SweepGamma,
            Cmd::Contours => Command::Contours,
            Cmd::Validate => Command::Validate,
            Cmd::Render => Command::Render,
        }
    }
}

/// Probe-absorption maps and localization analysis for a Λ atom with SGC.
#[derive(Debug, Parser)]
#[command(name = "atomloc", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,

    /// TOML run configuration.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Shipped preset (fig2a-fig2d, fig4a-fig4d, fig4-alt-theta); fig2d if neither this nor --config is given.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Output directory, overriding [output].dir.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for map computation. Affects speed only.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    match (&cli.config, &cli.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            parse_config(&text).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
                other => other,
            })
        }
        (None, Some(name)) => preset(name),
        (None, None) => preset("fig2d"),
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let go = || run(cli.command.into(), &cfg, &dir);
    let outcome = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Contract(format!("thread pool: {e}")))?
            .install(go)?,
        None => go()?,
    };
    for note in &outcome.notes {
        eprintln!("note: {note}");
    }
    for path in &outcome.artifacts {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
