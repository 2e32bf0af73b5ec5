//! Command-line front end: validate scenario files and run outage sweeps.

use clap::{Parser, Subcommand};
use fso_noma::cli::{rows_to_csv, CliError, ScenarioConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fso-noma",
    about = "Outage sweeps for two-transmitter NOMA over FSO backhaul links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario sweep and write the results as CSV.
    Run {
        /// Scenario file (flat key = value text).
        scenario: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario's Monte Carlo seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario's Monte Carlo sample count.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Validate a scenario file and print its derived quantities.
    Check {
        /// Scenario file (flat key = value text).
        scenario: PathBuf,
    },
}

// Exit codes: 0 ok, 1 configuration error, 2 numeric failure.
const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERIC: u8 = 2;

fn load(path: &PathBuf) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    ScenarioConfig::parse(&text)
}

fn fail(err: CliError) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        CliError::Config(_) => ExitCode::from(EXIT_CONFIG),
        CliError::Numeric(_) => ExitCode::from(EXIT_NUMERIC),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { scenario } => match load(&scenario).and_then(|c| c.check_report()) {
            Ok(report) => {
                print!("{report}");
                println!("ok");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Run {
            scenario,
            out,
            seed,
            samples,
        } => {
            let mut config = match load(&scenario) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if let Some(s) = seed {
                config.mc.seed = s;
            }
            if let Some(n) = samples {
                config.mc.n_samples = n;
            }
            match config.check_report() {
                Ok(report) => print!("{report}"),
                Err(e) => return fail(e),
            }
            let rows = match config.run() {
                Ok(rows) => rows,
                Err(e) => return fail(e),
            };
            let csv = rows_to_csv(&rows);
            if let Err(e) = std::fs::write(&out, csv) {
                return fail(CliError::Numeric(format!(
                    "cannot write {}: {e}",
                    out.display()
                )));
            }
            println!("wrote {} rows to {}", rows.len(), out.display());
            ExitCode::SUCCESS
        }
    }
}
