use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use optomech_mmse::config::RunConfig;
use optomech_mmse::sweep;

#[derive(Parser)]
#[command(
    name = "optomech-mmse",
    version,
    about = "Bayesian MMSE estimation of the optomechanical coupling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Average minimum cost and estimator spectrum over the tau grid.
    CostCurve(Common),
    /// Average estimator, bias and MSE over the g grid at the optimal time.
    EstimatorCurve(Common),
    /// MSE lower bound over the g grid at the optimal time.
    CrbCurve(Common),
    /// Optimal interaction time.
    FindTstar(Common),
    /// Runs the oracle cross-checks.
    Verify(Common),
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let common = match &cli.command {
        Command::CostCurve(c)
        | Command::EstimatorCurve(c)
        | Command::CrbCurve(c)
        | Command::FindTstar(c)
        | Command::Verify(c) => c,
    };
    let rc = RunConfig::load(common.config.as_deref(), &common.set).map_err(|e| e.to_string())?;
    let text = match &cli.command {
        Command::CostCurve(_) => sweep::cost_curve(&rc),
        Command::EstimatorCurve(_) => sweep::estimator_curve(&rc),
        Command::CrbCurve(_) => sweep::crb_curve(&rc).map(|curve| {
            for note in &curve.notes {
                eprintln!("{note}");
            }
            curve.csv
        }),
        Command::FindTstar(_) => sweep::find_tstar_report(&rc),
        Command::Verify(_) => {
            let report = sweep::verify(&rc);
            emit(&common.out, &report.render())?;
            return Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
    }
    .map_err(|e| e.to_string())?;
    emit(&common.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
