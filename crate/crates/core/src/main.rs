use std::path::PathBuf;
use std::process::ExitCode;

use ccn_sim::config::{parse_config, ConfigError, RunConfig};
use ccn_sim::dynamics::DynamicsError;
use ccn_sim::output::{cmd_run, cmd_spectrum, cmd_sweep, OutputError};
use ccn_sim::scenarios::{ScenarioError, DEFAULT_J_PRIMES};
use clap::{Parser, Subcommand};
use log::{info, warn};

/// Single-pulse CCN gate in a three-spin Ising chain.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy levels and single-flip transition frequencies.
    Spectrum,
    /// One π-pulse run: time series and final fidelity.
    Run,
    /// Fidelity and populations versus the second-neighbor coupling.
    Sweep {
        /// Comma-separated j_prime values.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_J_PRIMES.to_vec())]
        jprimes: Vec<f64>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("--config <path> is required")]
    NoConfig,
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Config { path: PathBuf, source: ConfigError },
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl CliError {
    /// Stable machine-readable tag and exit code.
    fn reason(&self) -> (&'static str, u8) {
        match self {
            Self::NoConfig | Self::Config { .. } => ("config", 2),
            Self::Read { .. } | Self::Output(OutputError::Io { .. }) => ("io", 4),
            Self::Output(OutputError::Scenario(e)) => match e {
                ScenarioError::NormDrift { .. } | ScenarioError::Dynamics(DynamicsError::NormDrift { .. }) => {
                    ("norm_drift", 3)
                }
                ScenarioError::Dynamics(DynamicsError::NotNormalized(_)) | ScenarioError::Observable(_) => {
                    ("not_normalized", 3)
                }
                _ => ("invalid_input", 2),
            },
        }
    }
}

fn load(path: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let path = path.ok_or(CliError::NoConfig)?;
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Read { path: path.clone(), source })?;
    parse_config(&text).map_err(|source| CliError::Config { path, source })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load(cli.config)?;
    for w in cfg.warnings() {
        warn!("{w}");
    }
    match cli.command {
        Command::Spectrum => {
            let path = cmd_spectrum(&cfg)?;
            info!("wrote {}", path.display());
        }
        Command::Run => {
            let out = cmd_run(&cfg)?;
            let f = out.result.fidelity;
            info!(
                "fidelity {:.9}{:+.9}i (|F| = {:.9}), max norm drift {:.3e}",
                f.value.re,
                f.value.im,
                f.modulus(),
                out.result.max_norm_drift
            );
            info!("wrote {} and {}", out.timeseries.display(), out.summary.display());
        }
        Command::Sweep { jprimes } => {
            if cfg.pulse_frequency.is_some() || cfg.duration.is_some() {
                warn!("pulse_frequency/duration overrides are ignored by sweep");
            }
            let out = cmd_sweep(&cfg, &jprimes)?;
            info!("wrote {}", out.path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (reason, code) = e.reason();
            eprintln!("error[{reason}]: {e}");
            ExitCode::from(code)
        }
    }
}
