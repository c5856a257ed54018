//! Command-line driver: configuration parsing, scenario orchestration and
//! deterministic artifact output.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime error,
//! 3 acceptance failure under `--strict`.

pub mod checks;
pub mod config;
pub mod output;
pub mod scenarios;
pub mod tolerances;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mirrorlang_core::ExecPolicy;
use thiserror::Error;

use config::{ConfigError, ScenarioConfig};
use tolerances::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_STRICT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] mirrorlang_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Core(_) | CliError::Io(_) => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mirrorlang",
    version,
    about = "Langevin dynamics of a mirror in a fluctuating scalar field"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `key = value` scenario configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file or directory, depending on the scenario
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when any acceptance check fails
    #[arg(long)]
    pub strict: bool,
    /// Overrides for the built-in pass/fail bands
    #[arg(long)]
    pub tol_file: Option<PathBuf>,
    /// Worker threads for path ensembles
    #[arg(long, conflicts_with = "sequential")]
    pub threads: Option<usize>,
    /// Run ensembles on the calling thread only
    #[arg(long)]
    pub sequential: bool,
}

impl Common {
    pub fn policy(&self) -> ExecPolicy {
        if self.sequential {
            ExecPolicy::Sequential
        } else {
            ExecPolicy::Parallel {
                threads: self.threads,
            }
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub n_paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Time,
    Freq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Chi,
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Vacuum,
    Thermal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FdtRegimeArg {
    Vacuum,
    Thermal,
    #[value(name = "highT", alias = "high-t")]
    HighT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Vacuum,
    ThermalOu,
    White,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a dissipation or fluctuation kernel on a grid
    Kernels {
        #[arg(long, value_enum, default_value = "freq")]
        domain: DomainArg,
        /// MIN:MAX:N
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "sigma")]
        kind: KindArg,
        #[arg(long, value_enum, default_value = "vacuum")]
        regime: RegimeArg,
        #[command(flatten)]
        common: Common,
    },
    /// Check the fluctuation-dissipation relation on the built-in kernels
    FdtCheck {
        #[arg(long, value_enum, default_value = "vacuum")]
        regime: FdtRegimeArg,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Synthesize noise paths and their ensemble autocovariance
    Noise {
        #[arg(long, value_enum, default_value = "vacuum")]
        spec: NoiseArg,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Noise-free damped oscillation and its secular fit
    Decay {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Velocity-variance growth driven by vacuum noise
    Heating {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Thermal relaxation and equipartition
    Thermal {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form laboratory estimates with their reference values
    Report {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Kernels { common, .. }
            | Command::FdtCheck { common, .. }
            | Command::Noise { common, .. }
            | Command::Decay { common, .. }
            | Command::Heating { common, .. }
            | Command::Thermal { common, .. }
            | Command::Report { common } => common,
        }
    }
}

/// Everything a scenario needs besides its own flags.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: ScenarioConfig,
    pub tolerances: Tolerances,
    /// Tolerance entries changed by `--tol-file`, folded into the hash.
    pub tol_overrides: Vec<(String, f64)>,
    pub policy: ExecPolicy,
    pub out: Option<PathBuf>,
}

fn load_context(common: &Common, ensemble: Option<&EnsembleArgs>) -> Result<Context, CliError> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            config::parse_config(&text)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(e) = ensemble {
        config.t_max = e.t_max.or(config.t_max);
        config.dt = e.dt.or(config.dt);
        config.n_paths = e.n_paths.or(config.n_paths);
        config.seed = e.seed.or(config.seed);
    }
    let mut tolerances = Tolerances::default();
    let mut tol_overrides = Vec::new();
    if let Some(path) = &common.tol_file {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!(
                "cannot read tolerance file {}: {e}",
                path.display()
            ))
        })?;
        tol_overrides = tolerances.apply_overrides(&text)?.into_iter().collect();
    }
    if common.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let out = common
        .out
        .clone()
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from));
    Ok(Context {
        config,
        tolerances,
        tol_overrides,
        policy: common.policy(),
        out,
    })
}

/// Runs a parsed command and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    let start = Instant::now();
    let strict = cli.command.common().strict;
    match dispatch(&cli.command, start) {
        Ok(outcome) => {
            for check in outcome.summary.checks.iter().filter(|c| !c.pass) {
                eprintln!(
                    "check failed: {} = {} (target {}, tolerance {})",
                    check.name, check.value, check.target, check.tolerance
                );
            }
            println!("{}", outcome.summary_path.display());
            if strict && !outcome.summary.pass {
                EXIT_STRICT
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, start: Instant) -> Result<scenarios::Outcome, CliError> {
    let ctx = match command {
        Command::Noise {
            ensemble, common, ..
        }
        | Command::Decay { ensemble, common }
        | Command::Heating { ensemble, common }
        | Command::Thermal { ensemble, common } => load_context(common, Some(ensemble))?,
        other => load_context(other.common(), None)?,
    };
    let outcome = match command {
        Command::Kernels {
            domain,
            grid,
            kind,
            regime,
            ..
        } => scenarios::kernels(&ctx, *domain, grid.as_deref(), *kind, *regime)?,
        Command::FdtCheck { regime, tol, .. } => scenarios::fdt_check(&ctx, *regime, *tol)?,
        Command::Noise { spec, .. } => scenarios::noise(&ctx, *spec)?,
        Command::Decay { .. } => scenarios::decay(&ctx)?,
        Command::Heating { .. } => scenarios::heating(&ctx)?,
        Command::Thermal { .. } => scenarios::thermal(&ctx)?,
        Command::Report { .. } => scenarios::report(&ctx)?,
    };
    let timing = output::Timing {
        config_hash: outcome.summary.config_hash.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    output::write_json(&output::timing_path(&outcome.summary_path), &timing)?;
    Ok(outcome)
}

/// Parses `args` (including the program name) and runs them. Clap help and
/// version requests exit 0; other argument errors exit 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}
