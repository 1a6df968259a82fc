//! `soler`: groundstates, solitary-wave branches, charge curves and the verification suite.

mod commands;
mod config;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ModelArgs, ScheduleArgs};
use failure::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "soler",
    version,
    about = "Nonrelativistic solitary waves of the nonlinear Dirac equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the NLS groundstate; CSV `r,u,du`, JSON summary on stdout.
    Groundstate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Continue a branch of solitary waves in eps; JSON document with one record per point.
    Branch {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Directory for per-point profile CSVs.
        #[arg(long)]
        dump_profiles: Option<PathBuf>,
    },
    /// Charge against omega with its derivative and the sign classification.
    ChargeCurve {
        /// Branch JSON written by `branch`.
        branch: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run acceptance criteria; exit 0 iff all selected criteria pass.
    Verify {
        /// groundstate, dirac, asymptotics, charge, properties or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        json: bool,
    },
    /// Solve one profile by direct shooting on V(0).
    OracleShoot {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Stdout text plus whether the command fully succeeded.
fn run(cli: Cli) -> Result<(String, bool), Failure> {
    match cli.command {
        Command::Groundstate { model, output } => {
            let mut cfg = model.resolve()?;
            if let Some(p) = output {
                cfg.output.groundstate_csv = p;
            }
            Ok((commands::cmd_groundstate(&cfg)?, true))
        }
        Command::Branch {
            model,
            schedule,
            output,
            dump_profiles,
        } => {
            let mut cfg = model.resolve()?;
            schedule.apply(&mut cfg);
            if let Some(p) = output {
                cfg.output.branch_json = p;
            }
            if dump_profiles.is_some() {
                cfg.output.profiles_dir = dump_profiles;
            }
            commands::cmd_branch(&cfg)
        }
        Command::ChargeCurve { branch, output } => Ok((
            commands::cmd_charge_curve(&branch, output.as_deref())?,
            true,
        )),
        Command::Verify { suite, json } => commands::cmd_verify(&suite, json),
        Command::OracleShoot { model, eps, output } => {
            let mut cfg = model.resolve()?;
            if let Some(p) = output {
                cfg.output.profile_csv = p;
            }
            Ok((commands::cmd_oracle_shoot(&cfg, eps)?, true))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("soler: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
