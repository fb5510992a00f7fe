use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use qmm::cli::{self, Abscissas, CliError};

#[derive(Parser)]
#[command(
    name = "qmm",
    version,
    about = "Quasi-Moment-Method rain-attenuation model calibration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a base model to a measurement CSV and write the report JSON.
    Fit {
        /// Run configuration JSON.
        #[arg(long)]
        config: PathBuf,
    },
    /// Print predictions of a saved model as CSV.
    #[command(group(ArgGroup::new("where").required(true).args(["at", "grid"])))]
    Predict {
        /// Calibrated model or fit report JSON.
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated abscissas.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// `min,max,n`: n points, log-spaced for exceedance models.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Print base and calibrated RMSE of a saved model on a measurement CSV.
    Evaluate {
        /// Calibrated model or fit report JSON.
        #[arg(long)]
        model: PathBuf,
        /// Measurement CSV.
        #[arg(long)]
        data: PathBuf,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Fit { config } => {
            let report = cli::run_fit(&config)?;
            eprintln!(
                "rmse_base_db={} rmse_qmm_db={} rank={}",
                report.rmse_base_db, report.rmse_qmm_db, report.diagnostics.rank
            );
            Ok(())
        }
        Command::Predict { model, at, grid } => {
            let abscissas = match (at, grid) {
                (Some(list), _) => Abscissas::List(cli::parse_abscissa_list(&list)?),
                (None, Some(g)) => Abscissas::Grid(cli::parse_grid_spec(&g)?),
                (None, None) => unreachable!("clap enforces one of --at/--grid"),
            };
            cli::run_predict(&model, &abscissas, &mut io::stdout().lock())
        }
        Command::Evaluate { model, data } => {
            cli::run_evaluate(&model, &data, &mut io::stdout().lock())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QMM_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let args = Cli::parse();
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
