//! `csisim`: simulate CSI exchanges along robot trajectories and estimate
//! relative bearings from the resulting virtual arrays.
//!
//! Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal
//! invariant violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use csisim_core::{ErrorKind, SteeringPower};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "csisim", version, about)]
struct Cli {
    /// Output root. Falls back to the config's `output_dir`, then `./csisim-out`.
    #[arg(long, short, global = true, env = "CSISIM_OUTPUT")]
    output: Option<PathBuf>,

    /// More log output (repeat for debug).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Only print errors.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ScenarioArgs {
    /// Path to a TOML config, or a preset name (see `csisim presets`).
    config: String,

    /// Override the config's `rng_seed`.
    #[arg(long)]
    seed: Option<u64>,

    /// Disable STO, timestamp skew and WGN (CFO stays on; it cancels).
    #[arg(long)]
    noiseless: bool,
}

#[derive(Args, Debug, Clone, Default)]
struct GridArgs {
    /// Grid resolution in degrees; must divide 180.
    #[arg(long, value_name = "DEG")]
    grid_step: Option<f64>,

    /// Collapse the polar axis to a single angle, e.g. 90 for planar motion.
    #[arg(long, value_name = "DEG")]
    polar_fixed: Option<f64>,

    /// Search the full polar range even if the config fixes it.
    #[arg(long, conflicts_with = "polar_fixed")]
    full_polar: bool,

    #[arg(long, value_enum)]
    steering: Option<SteeringArg>,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
enum SteeringArg {
    Single,
    Squared,
}

impl From<SteeringArg> for SteeringPower {
    fn from(s: SteeringArg) -> Self {
        match s {
            SteeringArg::Single => SteeringPower::Single,
            SteeringArg::Squared => SteeringPower::Squared,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List built-in presets, or print one as TOML.
    Presets {
        /// Print this preset's full config.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
    /// Simulate a scenario and write its dataset.
    Sim {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Estimate the bearing profile of a dataset and write the profile files.
    Estimate {
        /// Dataset manifest or the directory holding it.
        manifest: PathBuf,

        #[command(flatten)]
        grid: GridArgs,

        /// Write the result here instead of back into the dataset directory.
        #[arg(long, value_name = "DIR")]
        into: Option<PathBuf>,

        /// Print the run summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Simulate and estimate repeatedly with offset seeds, then aggregate.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,

        #[arg(long, default_value_t = 1)]
        reps: usize,

        /// Seed increment between repetitions (0 repeats the same seed).
        #[arg(long, default_value_t = 1)]
        seed_stride: u64,

        #[command(flatten)]
        grid: GridArgs,

        /// Also write each repetition's full dataset.
        #[arg(long)]
        keep_datasets: bool,
    },
    /// Compare the profiles of two estimated datasets.
    Compare {
        a: PathBuf,
        b: PathBuf,

        #[arg(long)]
        json: bool,
    },
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Validation => 1,
        ErrorKind::Io => 2,
        ErrorKind::Invariant => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "error",
        (false, 0) => "warn",
        (false, 1) => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
