use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use magdeform_cli::{
    run, Execution, Experiment, ExperimentConfig, RunOptions, Settings, EXIT_CONFIG,
};

/// Averaged intensities of magnetically deformed eigenfunctions.
#[derive(Debug, Parser)]
#[command(name = "magdeform", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Flat model: averaged intensity against the Weyl quadratic form.
    FlatAverage(Common),
    /// Harmonic oscillator: band, oracle triangle or invariant suite.
    HoAverage(Common),
    /// Zonal harmonics: averaged pole value or consistency checks.
    ZonalAverage(Common),
    /// Fubini order swap and Markov good-set fractions.
    Restriction(Common),
    /// Smallest singular value of the parameter Jacobian.
    Admissibility(Common),
    /// Log-log slope of the sup of the deformed intensity.
    SupScaling(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment config; defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for report.csv, summary.json and plot.dat.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Evaluate every task on the calling thread.
    #[arg(long)]
    serial: bool,
    /// Multiplies every check tolerance.
    #[arg(long, value_name = "FLOAT", default_value_t = 1.0)]
    tolerance_scale: f64,
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Command::FlatAverage(c) => (Experiment::FlatAverage, c),
            Command::HoAverage(c) => (Experiment::HoAverage, c),
            Command::ZonalAverage(c) => (Experiment::ZonalAverage, c),
            Command::Restriction(c) => (Experiment::Restriction, c),
            Command::Admissibility(c) => (Experiment::Admissibility, c),
            Command::SupScaling(c) => (Experiment::SupScaling, c),
        }
    }
}

fn main() -> ExitCode {
    let (experiment, args) = Cli::parse().command.split();
    let config = match &args.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => ExperimentConfig::default(),
    };
    let options = RunOptions {
        out_dir: args.out,
        settings: Settings {
            exec: if args.serial {
                Execution::Serial
            } else {
                Execution::Parallel
            },
            tolerance_scale: args.tolerance_scale,
        },
    };
    match run(experiment, &config, &options) {
        Ok(report) => {
            for d in &report.outcome.diagnostics {
                eprintln!("warning: {d}");
            }
            for c in &report.outcome.checks {
                let verdict = if c.pass { "pass" } else { "FAIL" };
                println!("{verdict}: {} = {:.6e} ({})", c.name, c.value, c.bound);
            }
            println!(
                "{} rows written to {}",
                report.outcome.rows.len(),
                report.out_dir.display()
            );
            ExitCode::from(report.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
