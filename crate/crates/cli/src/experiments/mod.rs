mod geometry;
mod measure;
mod zoom;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::report::Row;

pub use geometry::{builtin_tube_path, random_tube_path, PathSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExperimentInfo {
    pub id: &'static str,
    /// The result the experiment checks.
    pub anchor: &'static str,
    pub summary: &'static str,
}

pub const EXPERIMENTS: [ExperimentInfo; 13] = [
    ExperimentInfo {
        id: "tube",
        anchor: "Tube Lemma",
        summary: "projection to the axis shrinks length by e^(1-r) outside N_r(axis)",
    },
    ExperimentInfo {
        id: "morse",
        anchor: "Morse Lemma",
        summary: "BL images of geodesic segments stay within C = 4K^3+2K, windows within K' = C+1",
    },
    ExperimentInfo {
        id: "triangle-core",
        anchor: "Ideal triangle core lemma",
        summary: "points within R of all three sides of an ideal triangle form a compact set",
    },
    ExperimentInfo {
        id: "zoom",
        anchor: "Zoom sequence",
        summary: "h_n = f_n o h o g_n converges to the derivative map",
    },
    ExperimentInfo {
        id: "asterisk-scan",
        anchor: "Asterisk points",
        summary: "directional derivatives exist in all directions and D_1 h is nonzero",
    },
    ExperimentInfo {
        id: "good-lines",
        anchor: "Two good directions lemma",
        summary: "two good line directions force a conformal map",
    },
    ExperimentInfo {
        id: "disk-ratio",
        anchor: "Disk Theorem",
        summary: "inscribed and enclosing disks of h(disk) have bounded diameter ratio",
    },
    ExperimentInfo {
        id: "besicovich",
        anchor: "Besicovich covering",
        summary: "disjoint subfamily of total length at least mu(S)/3",
    },
    ExperimentInfo {
        id: "vitali",
        anchor: "Vitali covering lemma",
        summary: "disjoint intervals T with mu(S delta T) < epsilon",
    },
    ExperimentInfo {
        id: "porosity",
        anchor: "Porous sets are null",
        summary: "porosity verdicts on dyadic specimens",
    },
    ExperimentInfo {
        id: "fubini",
        anchor: "Baby Fubini",
        summary: "mu(S) < t^2 implies mu(F_t) <= t",
    },
    ExperimentInfo {
        id: "ac",
        anchor: "Absolute continuity",
        summary: "Cantor staircase witness, modulus of continuity, f = f_+ - f_-",
    },
    ExperimentInfo {
        id: "stiff-line",
        anchor: "Stiff lines",
        summary: "stiff strip measure and absolute continuity of pi o h on L_y",
    },
];

pub fn info(id: &str) -> Option<&'static ExperimentInfo> {
    EXPERIMENTS.iter().find(|e| e.id == id)
}

/// Runs the experiment and numbers its rows in order.
pub fn run_rows(id: &str, config: &ExperimentConfig) -> Result<Vec<Row>> {
    let p = &config.params;
    let seed = config.seed();
    let mut rows = match id {
        "tube" => geometry::tube(p, seed)?,
        "morse" => geometry::morse(p, seed)?,
        "triangle-core" => geometry::triangle_core(p)?,
        "zoom" => zoom::zoom(p)?,
        "asterisk-scan" => zoom::asterisk_scan(p)?,
        "good-lines" => zoom::good_lines(p)?,
        "disk-ratio" => zoom::disk_ratio(p)?,
        "stiff-line" => zoom::stiff_line(p)?,
        "besicovich" => measure::besicovich(p, seed)?,
        "vitali" => measure::vitali(p, seed)?,
        "porosity" => measure::porosity(p)?,
        "fubini" => measure::fubini(p, seed)?,
        "ac" => measure::ac(p)?,
        other => return Err(CliError::UnknownExperiment(other.to_string())),
    };
    for (i, row) in rows.iter_mut().enumerate() {
        row.case = i;
    }
    Ok(rows)
}

/// Independent stream `stream` of the run's generator.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn stream_id(group: usize, case: usize) -> u64 {
    ((group as u64) << 32) | case as u64
}

fn row(
    label: impl Into<String>,
    bound: f64,
    observed: f64,
    pass: bool,
    detail: impl Into<String>,
) -> Row {
    Row {
        case: 0,
        label: label.into(),
        bound,
        observed,
        pass,
        detail: detail.into(),
    }
}

/// A row that records a value without checking it.
fn info_row(label: impl Into<String>, bound: f64, observed: f64, detail: impl AsRef<str>) -> Row {
    row(
        label,
        bound,
        observed,
        true,
        format!("informational; {}", detail.as_ref()),
    )
}

fn require_positive(field: &str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(**v > 0.0)) {
        Some(v) => Err(CliError::Config(format!(
            "params.{field}: values must be positive, got {v}"
        ))),
        None => Ok(()),
    }
}
