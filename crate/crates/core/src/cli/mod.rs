//! `qsink` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 no finite lifetime,
//! 3 validation failure.

mod commands;
pub mod config;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_evolve, cmd_lifetime, cmd_optimal_state, cmd_sinkhorn, evolve_table, format_csv, EvolveRow, EvolveTable,
    LifetimeReport, OptimalStateReport, SinkhornReport,
};
pub use config::{FileConfig, FlagOverrides, InitialState, JobConfig, OutputFormat, StateKind};
pub use validate::{cmd_validate, run_suites, Grid, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_LIFETIME: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qsink",
    version,
    about = "Entanglement lifetime under depolarization and polarization-dependent loss"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximal entanglement lifetime of the two lines.
    Lifetime(JobArgs),
    /// Initial state that reaches the maximal lifetime.
    OptimalState(JobArgs),
    /// Negativity and detection probability trajectories of ψ₊ and the optimal state.
    Evolve(JobArgs),
    /// Sinkhorn normal form of a single line at one time.
    Sinkhorn(SinkhornArgs),
    /// Run the built-in oracle cross-checks.
    Validate,
}

#[derive(Debug, Args, Default)]
pub struct JobArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub gh1: Option<f64>,
    #[arg(long)]
    pub gv1: Option<f64>,
    #[arg(long)]
    pub g1: Option<f64>,
    #[arg(long)]
    pub gh2: Option<f64>,
    #[arg(long)]
    pub gv2: Option<f64>,
    #[arg(long)]
    pub g2: Option<f64>,
    /// Search limit (lifetime) or trajectory end time (evolve).
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of trajectory samples, including both endpoints.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

impl JobArgs {
    pub fn resolve(&self) -> crate::Result<JobConfig> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FlagOverrides {
            line1: [self.gh1, self.gv1, self.g1],
            line2: [self.gh2, self.gv2, self.g2],
            t_max: self.t_max,
            steps: self.steps,
            state: self.state,
            output_path: self.out.clone(),
            format: self.format,
        };
        JobConfig::resolve(file, flags)
    }
}

#[derive(Debug, Args)]
pub struct SinkhornArgs {
    #[arg(long, default_value_t = 0.0)]
    pub gh: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gv: f64,
    #[arg(long, default_value_t = 0.0)]
    pub g: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Writes `text` to `path`, or to `stdout` when there is no path.
pub(crate) fn emit(text: &str, path: Option<&PathBuf>, stdout: &mut dyn Write) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let job = |args: &JobArgs| args.resolve();
    let outcome = match &cli.command {
        Command::Lifetime(args) => job(args).map(|cfg| cmd_lifetime(&cfg, stdout, stderr)),
        Command::OptimalState(args) => job(args).map(|cfg| cmd_optimal_state(&cfg, stdout, stderr)),
        Command::Evolve(args) => job(args).map(|cfg| cmd_evolve(&cfg, stdout, stderr)),
        Command::Sinkhorn(args) => Ok(cmd_sinkhorn(args, stdout, stderr)),
        Command::Validate => Ok(cmd_validate(&Grid::from_env(), stdout, stderr)),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
