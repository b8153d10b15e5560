//! Command-line front end: subcommands for feasibility queries and the four
//! experiment drivers, with deterministic seeding and CSV/JSON output.
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible scenario,
//! 4 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coexist_ia::channel::NoiseSpec;
use coexist_ia::scenario::{Scenario, UserSpec};
use coexist_ia::solver::{check_feasibility, Feasibility};

use coexist_ia_sim::config::{Config, EigenModeChoice};
use coexist_ia_sim::drivers::{
    run_pd_delta, run_roc, run_sinr_sweep, run_user_sweep, RunOptions,
};
use coexist_ia_sim::output::Format;
use coexist_ia_sim::RunError;

/// Environment variable consulted for the master seed when `--seed` is
/// absent.
const SEED_ENV: &str = "COEXIST_IA_SEED";

#[derive(Parser)]
#[command(name = "coexist-ia", version, about = "Multicarrier radar/communication spectrum-sharing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EigenModeArg {
    /// Smallest-eigenvalue selection, as the update rule is printed.
    Literal,
    /// Dominant-eigenvalue selection (default).
    Maxsinr,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON scenario file; omitted means the subcommand's built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides COEXIST_IA_SEED and the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Eigenvector selection in the decoder update.
    #[arg(long, value_enum)]
    eigen_mode: Option<EigenModeArg>,
    /// Worker threads; results are byte-identical for any value.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check interference-alignment feasibility of a stream allocation.
    Feasibility {
        #[command(flatten)]
        common: CommonArgs,
        /// Subcarrier count (used with --dofs instead of a config file).
        #[arg(long)]
        nsc: Option<usize>,
        /// Comma-separated per-user stream counts; the last entry is the
        /// radar.
        #[arg(long, value_delimiter = ',')]
        dofs: Option<Vec<usize>>,
    },
    /// Trial-averaged sum-SINR over an SNR grid for every method.
    SinrSweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Receiver operating characteristics of the radar detector.
    Roc {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Detection-probability difference between the max-SINR design and
    /// SSSVSP across SNR, false-alarm targets and pulse counts.
    PdDelta {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sum-SINR of the max-SINR design as the user count grows.
    UserSweep {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn resolve_seed(flag: Option<u64>, cfg: &Config) -> Result<u64, RunError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(text) = std::env::var(SEED_ENV) {
        return text.trim().parse::<u64>().map_err(|e| {
            RunError::Config(format!("{SEED_ENV}={text:?} is not a valid u64 seed: {e}"))
        });
    }
    Ok(cfg.master_seed.unwrap_or(0))
}

/// Loads the config (or the subcommand default), then applies CLI overrides.
fn resolve_config(
    common: &CommonArgs,
    default: Config,
) -> Result<(Config, RunOptions, Format), RunError> {
    let mut cfg = match &common.config {
        Some(path) => Config::from_file(path)?,
        None => default,
    };
    if let Some(mode) = common.eigen_mode {
        cfg.eigen_mode = match mode {
            EigenModeArg::Literal => EigenModeChoice::Literal,
            EigenModeArg::Maxsinr => EigenModeChoice::Maxsinr,
        };
    }
    let master_seed = resolve_seed(common.seed, &cfg)?;
    cfg.master_seed = Some(master_seed); // echoed into the metadata
    if common.threads == 0 {
        return Err(RunError::Config("--threads must be >= 1".into()));
    }
    let format = match common.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    Ok((cfg, RunOptions { master_seed, threads: common.threads }, format))
}

fn feasibility_command(
    common: &CommonArgs,
    nsc: Option<usize>,
    dofs: Option<Vec<usize>>,
) -> Result<(), RunError> {
    let scenario: Scenario = match (&common.config, nsc, &dofs) {
        (_, Some(n), Some(list)) => {
            if list.is_empty() {
                return Err(RunError::Config("--dofs needs at least one entry".into()));
            }
            let mut users: Vec<UserSpec> = list[..list.len() - 1]
                .iter()
                .map(|&d| UserSpec::comm(n, d, true))
                .collect();
            users.push(UserSpec::radar(n, list[list.len() - 1]));
            Scenario::new(n, users, NoiseSpec::new(1.0))
                .map_err(|e| RunError::Config(e.to_string()))?
        }
        (Some(_), _, _) => {
            let (cfg, _, _) = resolve_config(common, Config::default())?;
            cfg.to_scenario()?
        }
        _ => {
            return Err(RunError::Config(
                "feasibility needs either --nsc with --dofs, or --config".into(),
            ))
        }
    };
    match check_feasibility(scenario.n_sc, &scenario.users)
        .map_err(|e| RunError::Config(e.to_string()))?
    {
        Feasibility::Feasible => {
            println!("feasible");
            Ok(())
        }
        Feasibility::Infeasible { condition, detail } => {
            println!("infeasible: {condition}: {detail}");
            Err(RunError::Infeasible(format!("{condition}: {detail}")))
        }
    }
}

fn run() -> Result<(), RunError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Feasibility { common, nsc, dofs } => {
            feasibility_command(common, *nsc, dofs.clone())
        }
        Command::SinrSweep { common } => {
            let (cfg, opts, format) = resolve_config(common, Config::default())?;
            run_sinr_sweep(&cfg, opts)?.write(common.out.as_deref(), format)
        }
        Command::Roc { common } => {
            let (cfg, opts, format) = resolve_config(common, Config::default_roc())?;
            run_roc(&cfg, opts)?.write(common.out.as_deref(), format)
        }
        Command::PdDelta { common } => {
            let (cfg, opts, format) = resolve_config(common, Config::default_pd_delta())?;
            run_pd_delta(&cfg, opts)?.write(common.out.as_deref(), format)
        }
        Command::UserSweep { common } => {
            let (cfg, opts, format) = resolve_config(common, Config::default_user_sweep())?;
            run_user_sweep(&cfg, opts)?.write(common.out.as_deref(), format)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
