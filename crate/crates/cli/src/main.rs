//! `mpr`: fit, select and simulate Weibull multi-parameter regression models.

mod commands;
mod error;
mod input;
mod report;
mod simulate;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "mpr", version, about = "Weibull multi-parameter regression for survival data")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one model and report coefficients, tests and information criteria.
    Fit(FitArgs),
    /// Stagewise covariate selection over scale, shape and joint moves.
    Step(StepArgs),
    /// Time-dependent hazard ratio curves with crossing times.
    Hr(HrArgs),
    /// Kaplan-Meier curves, optionally with model-based overlays.
    Km(KmArgs),
    /// Simulation studies (selection frequencies or coefficient correlations).
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the follow-up time column.
    #[arg(long, default_value = "time")]
    pub time: String,
    /// Name of the event indicator column (1 event, 0 censored).
    #[arg(long, default_value = "status")]
    pub status: String,
    /// Columns to read as categorical regardless of content.
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Columns to read as numeric.
    #[arg(long, value_delimiter = ',')]
    pub numeric: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Scale covariates, comma separated; `1` for intercept only.
    #[arg(long, value_delimiter = ',')]
    pub scale: Vec<String>,
    /// Shape covariates, comma separated; `1` for intercept only (proportional hazards).
    #[arg(long, value_delimiter = ',')]
    pub shape: Vec<String>,
    /// Reference level of a factor, as FACTOR=LEVEL.
    #[arg(long = "reference", value_name = "FACTOR=LEVEL")]
    pub references: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = "mpr-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionArg {
    Aic,
    Bic,
    Lrt,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Confidence level for ellipses.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Also fit the proportional-hazards restriction (shape intercept only)
    /// and test it against the requested model.
    #[arg(long)]
    pub compare_ph: bool,
    /// Export a joint confidence ellipse for EFFECT (`name` or `name[level]`).
    #[arg(long = "ellipse", value_name = "EFFECT")]
    pub ellipses: Vec<String>,
    /// Points on each exported ellipse.
    #[arg(long, default_value_t = 100)]
    pub ellipse_points: usize,
    /// Newton-Raphson iteration limit.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args)]
pub struct StepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Candidate covariates in tie-break order (default: every covariate).
    #[arg(long, value_delimiter = ',')]
    pub candidates: Vec<String>,
    #[arg(long, value_enum, default_value_t = CriterionArg::Aic)]
    pub criterion: CriterionArg,
    /// Significance level for `--criterion lrt`.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Forward moves only.
    #[arg(long)]
    pub forward_only: bool,
    /// Restrict the search to scale moves (proportional hazards).
    #[arg(long)]
    pub scale_only: bool,
    /// Fit each candidate model from the default start instead of the current fit.
    #[arg(long)]
    pub cold_start: bool,
}

#[derive(Debug, Clone, Args)]
pub struct HrArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Effect to compare with its reference (`name` or `name[level]`); repeatable.
    #[arg(long = "effect", value_name = "EFFECT", required = true)]
    pub effects: Vec<String>,
    /// Number of grid points between the first and last event time.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Upper end of the time grid instead of the last event time.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Average the ratio over the sample's other shape covariates instead
    /// of holding them at a profile.
    #[arg(long)]
    pub average: bool,
    /// Shape-covariate profile value, as NAME=VALUE (default: reference/zero).
    #[arg(long = "at", value_name = "NAME=VALUE")]
    pub at: Vec<String>,
    /// Confidence level for pointwise bands.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

#[derive(Debug, Clone, Args)]
pub struct KmArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Categorical covariate defining the groups.
    #[arg(long)]
    pub by: Option<String>,
    /// Write the fitted model's average survivor per group next to the
    /// Kaplan-Meier estimate (uses --scale/--shape).
    #[arg(long)]
    pub overlay: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Selection,
    Correlation,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub out: OutArgs,
    /// TOML study configuration; overrides the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Study::Selection)]
    pub study: Study,
    /// Sample size per replicate (default 500 for selection, 1000 for correlation).
    #[arg(long)]
    pub n: Option<usize>,
    /// Target censored proportion.
    #[arg(long, default_value_t = 0.5)]
    pub censoring: f64,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Selection criteria to run on the same replicates (repeatable).
    #[arg(long = "criterion", value_enum)]
    pub criteria: Vec<CriterionArg>,
    /// Significance level for the LRT criterion.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Step(a) => commands::step(a),
        Command::Hr(a) => commands::hr(a),
        Command::Km(a) => commands::km(a),
        Command::Simulate(a) => simulate::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
