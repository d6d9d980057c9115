//! Command-line front end: simulate scenarios, classify event logs with the
//! distance- and time-based criteria, emit tuning diagnostics, aggregate
//! onto the hall grid and render maps.
//!
//! Exit codes: 0 success, 1 data error (missing/unreadable input, strict
//! ingestion abort), 2 usage error (bad flags, invalid parameters, unknown
//! devices, malformed scenario files).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hallmap::io::InputFormat;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or unparseable data; exit code 1.
    Data(anyhow::Error),
    /// Invalid invocation or configuration; exit code 2.
    Usage(anyhow::Error),
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "hallmap",
    version,
    about = "Movement analytics for indoor positioning event streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic event log from a scenario file or preset
    Simulate(SimulateArgs),
    /// Label every event with both criteria and the fused class
    Classify(ClassifyArgs),
    /// Emit threshold-tuning series and bar charts for one device
    Tune(TuneArgs),
    /// Aggregate fused classes onto the hall grid and render the map
    Grid(GridArgs),
    /// Re-render a hall map from an existing grid CSV
    Render(RenderArgs),
}

/// Classifier parameters shared by classify, tune and grid.
#[derive(Args)]
pub struct ParamArgs {
    /// Sliding count window width in events
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Distance radius threshold in meters (AME iff mscw > r)
    #[arg(long, default_value_t = 1.5)]
    r: f64,
    /// Event lag of the time criterion (defaults to --k)
    #[arg(long)]
    time_k: Option<usize>,
    /// Time threshold in seconds (AME iff elapsed time <= b)
    #[arg(long, default_value_t = 15.0)]
    b: f64,
}

/// Grid geometry shared by grid and render.
#[derive(Args)]
pub struct GridOpts {
    /// Cell edge length in meters
    #[arg(long, default_value_t = 1.0)]
    cell_size: f64,
    /// Fused events required before a cell gets a dominant class
    #[arg(long, default_value_t = 5)]
    min_events: usize,
    /// Grid origin as "x,y" in meters (default: floor of the data bounding box)
    #[arg(long, value_parser = parse_origin)]
    origin: Option<(f64, f64)>,
}

fn parse_origin(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"x,y\", got {s:?}"));
    }
    let x: f64 = parts[0].trim().parse().map_err(|e| format!("bad x: {e}"))?;
    let y: f64 = parts[1].trim().parse().map_err(|e| format!("bad y: {e}"))?;
    Ok((x, y))
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Scenario file (TOML; see the config module docs or README)
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Bundled scenario preset
    #[arg(long, value_parser = ["demo-hall", "paper-scale"])]
    preset: Option<String>,
    /// Master seed (overrides the scenario file's)
    #[arg(long)]
    seed: Option<u64>,
    /// Per-axis measurement noise sigma in meters (demo-hall preset only)
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    /// Output format for the event log
    #[arg(long, default_value = "csv")]
    format: InputFormat,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Event log to classify
    #[arg(long)]
    input: PathBuf,
    /// Input format
    #[arg(long, default_value = "csv")]
    format: InputFormat,
    /// Abort on the first malformed record instead of skipping it
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    params: ParamArgs,
    /// Format of the label files
    #[arg(long, default_value = "csv")]
    out_format: InputFormat,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
pub struct TuneArgs {
    /// Event log to read
    #[arg(long)]
    input: PathBuf,
    /// Input format
    #[arg(long, default_value = "csv")]
    format: InputFormat,
    /// Abort on the first malformed record instead of skipping it
    #[arg(long)]
    strict: bool,
    /// Device to diagnose
    #[arg(long)]
    device: String,
    #[command(flatten)]
    params: ParamArgs,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
pub struct GridArgs {
    /// Event log, or a fused label file with --from-labels
    #[arg(long)]
    input: PathBuf,
    /// Input format
    #[arg(long, default_value = "csv")]
    format: InputFormat,
    /// Abort on the first malformed record instead of skipping it
    #[arg(long)]
    strict: bool,
    /// Treat the input as a fused label file from `classify` instead of raw
    /// events
    #[arg(long)]
    from_labels: bool,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridOpts,
    /// Worker threads for per-device classification (0 = all cores)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
pub struct RenderArgs {
    /// Grid CSV written by `grid`
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    grid: GridOpts,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Classify(args) => commands::classify(args),
        Command::Tune(args) => commands::tune(args),
        Command::Grid(args) => commands::grid(args),
        Command::Render(args) => commands::render_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Data(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
