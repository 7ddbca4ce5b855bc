use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One checked case. `bound` and `observed` are the two sides of the check; rows marked
/// informational in `detail` always pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub case: usize,
    pub label: String,
    pub bound: f64,
    pub observed: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub experiment: String,
    pub pass: bool,
    pub tool_version: String,
    pub config_digest: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_seconds: Option<f64>,
    pub rows: Vec<Row>,
}

impl RunReport {
    pub fn new(experiment: &str, seed: u64, config_digest: String, rows: Vec<Row>) -> Self {
        Self {
            experiment: experiment.to_string(),
            pass: rows.iter().all(|r| r.pass),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest,
            seed,
            wall_time_seconds: None,
            rows,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)
                .map_err(|e| CliError::Config(format!("csv: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes `<id>.csv` and `<id>.json` (and `<id>.svg` when `plot` is set) into `dir`,
    /// creating it if needed. Returns the written paths.
    pub fn write(&self, dir: &Path, plot: bool) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let mut files = vec![
            (dir.join(format!("{}.csv", self.experiment)), self.to_csv()?),
            (
                dir.join(format!("{}.json", self.experiment)),
                self.to_json(),
            ),
        ];
        if plot {
            files.push((
                dir.join(format!("{}.svg", self.experiment)),
                crate::plot::svg(self),
            ));
        }
        for (path, contents) in &files {
            std::fs::write(path, contents).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}
