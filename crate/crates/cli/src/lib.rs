//! Config-driven experiment runner for the `magdeform` models.
//!
//! [`run`] validates a config, executes one experiment and writes
//! `report.csv`, `summary.json` and `plot.dat` into the output directory.
//! The exit code follows the row statuses: `0` when every row is `ok` or a
//! warning, `2` when any row carries `error:resolution`, and `1` for
//! configuration errors.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::path::{Path, PathBuf};

pub use config::{Experiment, ExperimentConfig};
pub use error::{ConfigError, RunError};
pub use experiments::{execute, Settings};
pub use magdeform::Execution;
pub use report::{Check, Outcome, ReportRow, Status};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_RESOLUTION: u8 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Overrides `output_dir` from the config.
    pub out_dir: Option<PathBuf>,
    pub settings: Settings,
}

#[derive(Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub out_dir: PathBuf,
    pub exit_code: u8,
}

/// Runs one experiment and writes its report files.
pub fn run(
    experiment: Experiment,
    config: &ExperimentConfig,
    options: &RunOptions,
) -> Result<RunReport, RunError> {
    let mode = config.validate(experiment)?;
    let outcome = execute(experiment, &mode, config, options.settings)?;
    let out_dir = options
        .out_dir
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    sweep_table(experiment, &mode, &outcome, &options.settings, &out_dir)?;
    let exit_code = if outcome.has_resolution_error() {
        EXIT_RESOLUTION
    } else {
        EXIT_OK
    };
    Ok(RunReport {
        outcome,
        out_dir,
        exit_code,
    })
}

/// Writes `report.csv`, `summary.json` and `plot.dat` under `dir`.
pub fn sweep_table(
    experiment: Experiment,
    mode: &str,
    outcome: &Outcome,
    settings: &Settings,
    dir: &Path,
) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(|source| RunError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    report::write_csv(&dir.join("report.csv"), &outcome.rows)?;
    report::write_plot_table(&dir.join("plot.dat"), &outcome.rows)?;
    let summary = report::Summary {
        experiment: experiment.id(),
        mode,
        serial: settings.exec == Execution::Serial,
        tolerance_scale: settings.tolerance_scale,
        row_count: outcome.rows.len(),
        resolution_errors: outcome
            .rows
            .iter()
            .filter(|r| r.status == Status::Resolution)
            .count(),
        slopes: &outcome.slopes,
        ratios: &outcome.ratios,
        checks: &outcome.checks,
        all_checks_pass: outcome.checks.iter().all(|c| c.pass),
        details: &outcome.details,
        diagnostics: &outcome.diagnostics,
    };
    report::write_summary(&dir.join("summary.json"), &summary)
}
