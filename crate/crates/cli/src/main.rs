use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lohe_cli::config::load_config;
use lohe_cli::experiment::{pair_run, run_experiment};
use lohe_cli::output::fmt_float;
use lohe_cli::suites::{run_suite, CheckStatus};
use lohe_cli::CliError;
use lohe_core::thresholds::{find_beta0, find_beta1, lambda_of, m_of};

#[derive(Parser)]
#[command(name = "lohe", version, about = "Discrete aggregation dynamics harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a config file
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a scripted acceptance suite and print its report as JSON
    Suite {
        suite_id: String,
        /// Replace the canonical parameters with a config file
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Step two ensembles in lockstep and record their relative distance
    Pair {
        #[arg(long = "config-a")]
        config_a: PathBuf,
        #[arg(long = "config-b")]
        config_b: PathBuf,
    },
    /// Print the contraction thresholds and a Lambda/M table
    Thresholds,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run { config } => {
            let cfg = load_config(&config)?;
            let artifacts = run_experiment(&cfg)?;
            for path in [
                artifacts.diagnostics_path,
                artifacts.final_state_path,
                artifacts.framework_report_path,
            ]
            .into_iter()
            .flatten()
            {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite { suite_id, config } => {
            let cfg = config.map(|p| load_config(&p)).transpose()?;
            let report = run_suite(&suite_id, cfg.as_ref())?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.passed {
                Ok(ExitCode::SUCCESS)
            } else {
                let culprit = report
                    .checks
                    .iter()
                    .find(|c| c.status != CheckStatus::Pass)
                    .map(|c| c.name.clone())
                    .unwrap_or_else(|| "unknown check".to_string());
                eprintln!("suite {} failed at: {culprit}", report.suite);
                Ok(ExitCode::from(4))
            }
        }
        Command::Pair { config_a, config_b } => {
            let cfg_a = load_config(&config_a)?;
            let cfg_b = load_config(&config_b)?;
            let artifacts = pair_run(&cfg_a, &cfg_b)?;
            for path in [artifacts.diagnostics_path, artifacts.framework_report_path]
                .into_iter()
                .flatten()
            {
                println!("wrote {}", path.display());
            }
            if let Some(last) = artifacts.distances.last() {
                println!("final relative distance {}", fmt_float(*last));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Thresholds => {
            println!("beta0 = {}", fmt_float(find_beta0()));
            println!("beta1 = {}", fmt_float(find_beta1()));
            println!();
            println!("{:>6}  {:>24}  {:>24}", "beta", "Lambda(beta)", "M(beta)");
            for k in 0..=8 {
                let beta = 0.05 * k as f64;
                println!(
                    "{beta:>6.2}  {:>24}  {:>24}",
                    fmt_float(lambda_of(beta)),
                    fmt_float(m_of(beta))
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
