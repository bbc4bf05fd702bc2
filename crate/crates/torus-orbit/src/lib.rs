//! Batch front end for `torus-orbit-core`: reads JSON inputs, runs one
//! analysis and writes a JSON or CSV report that embeds the full run
//! configuration.

pub mod commands;
pub mod config;
pub mod exit;
pub mod input;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Outcome;
use config::RunConfig;
use input::InputError;
use report::{Report, Table};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON file with run settings; missing fields take their defaults.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Overrides the seed from the config file.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Writes the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Parser)]
#[command(name = "torus-orbit", version, about = "Finite orbits of nilpotent group actions on the torus")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classifies the subgroup of GL(2,Z) generated by the matrices in FILE.
    Classify { file: PathBuf },
    /// Lefschetz number and element type of each matrix in FILE.
    Lefschetz { file: PathBuf },
    /// Birkhoff averages and their convex hull for an identity-class map.
    RotationSet { file: PathBuf },
    /// Torus fixed points, indices and the index-sum check.
    FixedPoints { file: PathBuf },
    /// Searches a finite orbit of the group in FILE and reports the orbit.
    FiniteOrbit { file: PathBuf },
    /// Same search as finite-orbit, reporting every intermediate result.
    Verify { file: PathBuf },
    /// Rotation number (degree 1) or the two fixed points (degree -1).
    Circle {
        file: PathBuf,
        /// Analyze the k-th iterate.
        #[arg(long, default_value_t = 1)]
        iterate: u32,
    },
    /// Doubles an annulus map to a torus map and reports its class.
    DoubleAnnulus { file: PathBuf },
    /// The two torus lifts of a Klein-bottle map and their Lefschetz numbers.
    Klein {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        check_tol: f64,
        /// Lefschetz number of the Klein-bottle map; the pair must be {2L, 0}.
        #[arg(long, allow_hyphen_values = true)]
        declared: Option<i64>,
    },
    /// Interior orbit and boundary behavior of a Möbius-strip map.
    Mobius {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        check_tol: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Lefschetz { .. } => "lefschetz",
            Command::RotationSet { .. } => "rotation-set",
            Command::FixedPoints { .. } => "fixed-points",
            Command::FiniteOrbit { .. } => "finite-orbit",
            Command::Verify { .. } => "verify",
            Command::Circle { .. } => "circle",
            Command::DoubleAnnulus { .. } => "double-annulus",
            Command::Klein { .. } => "klein",
            Command::Mobius { .. } => "mobius",
        }
    }
}

/// A finished run: the rendered report, where it goes, and the exit code.
pub struct Execution {
    pub output: String,
    pub out: Option<PathBuf>,
    pub exit_code: u8,
    pub message: Option<String>,
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::Io(format!("{}: {e}", path.display())))
}

fn load_config(common: &Common) -> Result<RunConfig, InputError> {
    let mut config = match &common.config {
        Some(path) => RunConfig::from_json(&read(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn dispatch(command: &Command, config: &RunConfig) -> Result<Outcome, InputError> {
    Ok(match command {
        Command::Classify { file } => commands::classify(&input::read_matrices(&read(file)?)?, config),
        Command::Lefschetz { file } => commands::lefschetz(&input::read_matrices(&read(file)?)?),
        Command::RotationSet { file } => commands::rotation_set(&input::read_map(&read(file)?)?, config),
        Command::FixedPoints { file } => commands::fixed_points(&input::read_map(&read(file)?)?, config),
        Command::FiniteOrbit { file } => commands::finite_orbit(&input::read_group(&read(file)?)?, config, false),
        Command::Verify { file } => commands::finite_orbit(&input::read_group(&read(file)?)?, config, true),
        Command::Circle { file, iterate } => commands::circle(&input::read_circle(&read(file)?)?, config, *iterate),
        Command::DoubleAnnulus { file } => commands::double(&input::read_annulus(&read(file)?)?),
        Command::Klein { file, check_tol, declared } => {
            commands::klein(&input::read_map(&read(file)?)?, *check_tol, *declared)
        }
        Command::Mobius { file, check_tol } => commands::mobius(&input::read_annulus(&read(file)?)?, *check_tol, config),
    })
}

/// Runs one parsed command line without touching stdout or the exit status.
pub fn run(cli: &Cli) -> Execution {
    let (config, outcome) = match load_config(&cli.common) {
        Ok(config) => {
            let outcome = dispatch(&cli.command, &config).unwrap_or_else(|e| input_failure(&e));
            (config, outcome)
        }
        Err(e) => (RunConfig::default(), input_failure(&e)),
    };
    let status = if outcome.exit_code == exit::SUCCESS { "ok" } else { "failed" };
    let report = Report {
        command: cli.command.name(),
        config: &config,
        status,
        exit_code: outcome.exit_code,
        result: outcome.result,
        table: outcome.table,
    };
    let output = match cli.common.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv().unwrap_or_else(|e| format!("# csv error: {e}\n")),
    };
    Execution {
        output,
        out: cli.common.out.clone(),
        exit_code: outcome.exit_code,
        message: outcome.message,
    }
}

fn input_failure(e: &InputError) -> Outcome {
    Outcome {
        exit_code: exit::INPUT,
        result: serde_json::json!({"error": e.to_string()}),
        table: Table::new(vec!["error"]),
        message: Some(e.to_string()),
    }
}
