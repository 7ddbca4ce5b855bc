//! Experiment runner: maps each verifier in `halfspace` to a reproducible batch job with CSV,
//! JSON and optional SVG output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod report;

use std::time::Instant;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use experiments::{ExperimentInfo, EXPERIMENTS};
pub use report::{Row, RunReport};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HALFSPACE_OUT_DIR";

/// Runs experiment `id`. With `timing`, the report carries the wall time, which makes it differ
/// between runs.
pub fn run(id: &str, config: &ExperimentConfig, timing: bool) -> Result<RunReport> {
    if experiments::info(id).is_none() {
        return Err(CliError::UnknownExperiment(id.to_string()));
    }
    if let Some(named) = &config.experiment {
        if named != id {
            return Err(CliError::Config(format!(
                "experiment: config names {named:?} but {id:?} was requested"
            )));
        }
    }
    let start = Instant::now();
    let rows = experiments::run_rows(id, config)?;
    let mut report = RunReport::new(id, config.seed(), config.digest(id), rows);
    if timing {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

/// One line per experiment: id, anchor and summary, tab-separated, in registry order.
pub fn list_experiments() -> String {
    EXPERIMENTS
        .iter()
        .map(|e| format!("{}\t{}\t{}\n", e.id, e.anchor, e.summary))
        .collect()
}
