use std::path::{Path, PathBuf};

use halfspace::hyperbolic::MobiusMap;
use halfspace::measure::{DyadicIntervals, DyadicSet, Rational, StandardFunction};
use halfspace::morse::CoreGrid;
use halfspace::zoom::{BoundaryHomeo, Disk, HomeoPrimitive, RealAffine, ScanGrid, ShearProfile};
use halfspace::{Complex, DBoundaryHomeo};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One experiment run, as read from a TOML file and overridden by command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the id given on the command line when present.
    pub experiment: Option<String>,
    /// Seed for every randomized sampler; 0 when absent.
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub plot: bool,
}

/// Experiment parameters. Each experiment reads the fields it needs and falls back to its own
/// defaults for absent ones; see the README for the per-experiment table.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Tube radii.
    pub r: Option<Vec<f64>>,
    /// Path source: `random`, `builtin:radial`, `builtin:horizontal` or `builtin:arc`.
    pub paths: Option<String>,
    /// Number of random cases (paths, segments, families, sets).
    pub count: Option<usize>,
    /// Extra clearance of random paths beyond `r`.
    pub margin: Option<f64>,
    /// BL constants of the stretch maps `diag(K, 1)`.
    #[serde(rename = "K")]
    pub k: Option<Vec<f64>>,
    /// Minimum samples per geodesic segment.
    pub samples: Option<usize>,
    /// Morse window radii.
    pub windows: Option<Vec<f64>>,
    /// Number of random geodesics for the window check.
    pub geodesics: Option<usize>,
    /// Triangle-core radii.
    pub radii: Option<Vec<f64>>,
    pub core_grid: Option<CoreGrid<f64>>,
    pub maps: Option<Vec<MapSpec>>,
    /// Zoom center.
    pub center: Option<[f64; 2]>,
    /// Zoom scales `n`.
    pub scales_n: Option<Vec<u64>>,
    /// Final bound on the zoom error at the largest `n`.
    pub final_bound: Option<f64>,
    pub grid: Option<ScanGrid<f64>>,
    pub expect: Option<Vec<AsteriskExpectation>>,
    pub tol: Option<f64>,
    pub disk: Option<Disk<f64>>,
    /// Boundary samples for the disk ratio.
    pub resolution: Option<usize>,
    /// Dyadic level of random sets and families.
    pub level: Option<u32>,
    /// Vitali thresholds, as exact fractions such as `"1/16"`.
    pub epsilon: Option<Vec<String>>,
    pub family: Option<DyadicIntervals>,
    pub sets: Option<Vec<SetSpec>>,
    /// Porosity specimens with optional expected verdicts.
    pub specimens: Option<Vec<Specimen>>,
    /// Porosity parameter, as an exact fraction.
    pub delta: Option<String>,
    /// Dyadic scales `k` (intervals of length `2^-k`).
    pub scales: Option<Vec<u32>>,
    /// Fubini thresholds, as exact fractions.
    pub t: Option<Vec<String>>,
    /// Functions for the variation and modulus checks.
    pub functions: Option<Vec<StandardFunction<f64>>>,
    /// Modulus exponents `k` for `δ = 2^-k`.
    pub deltas: Option<Vec<u32>>,
    /// Sampling resolution `r` (`2^r` intervals) of the variation decomposition.
    pub resolution_log2: Option<u32>,
    pub cantor_level: Option<u32>,
    /// Heights of the stiff-line checks.
    pub y: Option<Vec<f64>>,
}

/// A boundary homeomorphism built from named primitives, applied in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    /// `z ↦ (az + b) / (cz + d)` with complex coefficients as `[re, im]`.
    Mobius {
        a: [f64; 2],
        b: [f64; 2],
        c: [f64; 2],
        d: [f64; 2],
    },
    /// `v ↦ M v + w` on `R²`.
    Affine {
        matrix: [[f64; 2]; 2],
        translation: Option<[f64; 2]>,
    },
    RadialPower {
        exponent: f64,
    },
    Shear {
        profile: ShearProfile,
        coefficient: Option<f64>,
    },
    Compose {
        maps: Vec<MapSpec>,
    },
}

fn c([re, im]: [f64; 2]) -> Complex<f64> {
    Complex::new(re, im)
}

impl MapSpec {
    pub fn build(&self) -> Result<DBoundaryHomeo> {
        Ok(match self {
            MapSpec::Identity => BoundaryHomeo::identity(),
            MapSpec::Mobius { a, b, c: cc, d } => {
                BoundaryHomeo::mobius(MobiusMap::new(c(*a), c(*b), c(*cc), c(*d))?)
            }
            MapSpec::Affine {
                matrix,
                translation,
            } => BoundaryHomeo::real_affine(RealAffine::new(
                *matrix,
                c(translation.unwrap_or([0.0, 0.0])),
            )?),
            MapSpec::RadialPower { exponent } => BoundaryHomeo::radial_power(*exponent)?,
            MapSpec::Shear {
                profile,
                coefficient,
            } => BoundaryHomeo::new(vec![HomeoPrimitive::Shear {
                profile: *profile,
                coefficient: coefficient.unwrap_or(1.0),
            }])?,
            MapSpec::Compose { maps } => {
                let mut h = BoundaryHomeo::identity();
                for m in maps {
                    h = h.then(&m.build()?);
                }
                h
            }
        })
    }

    /// Short label for report rows.
    pub fn label(&self) -> String {
        let cx = |[re, im]: [f64; 2]| {
            if im == 0.0 {
                format!("{re}")
            } else {
                format!("{re}{im:+}i")
            }
        };
        match self {
            MapSpec::Identity => "identity".into(),
            MapSpec::Mobius { a, b, c, d } => {
                format!("mobius({},{},{},{})", cx(*a), cx(*b), cx(*c), cx(*d))
            }
            MapSpec::Affine {
                matrix: m,
                translation,
            } => match translation {
                Some(t) if *t != [0.0, 0.0] => format!(
                    "affine([{},{};{},{}]+{})",
                    m[0][0],
                    m[0][1],
                    m[1][0],
                    m[1][1],
                    cx(*t)
                ),
                _ => format!("affine([{},{};{},{}])", m[0][0], m[0][1], m[1][0], m[1][1]),
            },
            MapSpec::RadialPower { exponent } => format!("radial_power({exponent})"),
            MapSpec::Shear {
                profile,
                coefficient,
            } => {
                format!(
                    "shear({},{})",
                    serde_json::to_string(profile)
                        .unwrap_or_default()
                        .trim_matches('"'),
                    coefficient.unwrap_or(1.0)
                )
            }
            MapSpec::Compose { maps } => maps
                .iter()
                .map(MapSpec::label)
                .collect::<Vec<_>>()
                .join(" then "),
        }
    }

    pub fn diag(a: f64, b: f64) -> Self {
        MapSpec::Affine {
            matrix: [[a, 0.0], [0.0, b]],
            translation: None,
        }
    }

    pub fn mobius_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        MapSpec::Mobius {
            a: [a, 0.0],
            b: [b, 0.0],
            c: [c, 0.0],
            d: [d, 0.0],
        }
    }
}

/// A dyadic set description. Fractions are exact strings such as `"3/8"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Full {
        dim: u8,
        level: u32,
    },
    Interval {
        level: u32,
        a: String,
        b: String,
    },
    GapCantor {
        generations: u32,
        level: u32,
    },
    Cells {
        dim: u8,
        level: u32,
        cells: Vec<[u32; 2]>,
    },
}

impl SetSpec {
    pub fn build(&self, field: &str) -> Result<DyadicSet> {
        Ok(match self {
            SetSpec::Full { dim, level } => DyadicSet::full(*dim, *level)?,
            SetSpec::Interval { level, a, b } => {
                DyadicSet::interval(*level, parse_fraction(field, a)?, parse_fraction(field, b)?)?
            }
            SetSpec::GapCantor { generations, level } => {
                DyadicSet::gap_cantor(*generations, *level)?
            }
            SetSpec::Cells { dim, level, cells } => {
                DyadicSet::new(*dim, *level, cells.iter().copied())?
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            SetSpec::Full { dim, level } => format!("full(d={dim},L={level})"),
            SetSpec::Interval { level, a, b } => format!("[{a},{b}](L={level})"),
            SetSpec::GapCantor { generations, level } => {
                format!("gap_cantor({generations},L={level})")
            }
            SetSpec::Cells { dim, level, cells } => {
                format!("cells(d={dim},L={level},n={})", cells.len())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PorousExpect {
    /// Every cell midpoint is porous.
    All,
    /// No cell midpoint is porous.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Specimen {
    pub set: SetSpec,
    pub expect: Option<PorousExpect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsteriskExpectation {
    pub z: [f64; 2],
    pub asterisk: bool,
    /// Expected `D_1 h(z)`, checked to `1e-6`.
    pub d1: Option<[f64; 2]>,
}

impl AsteriskExpectation {
    pub fn z(&self) -> Complex<f64> {
        c(self.z)
    }

    pub fn d1(&self) -> Option<Complex<f64>> {
        self.d1.map(c)
    }
}

pub fn parse_fraction(field: &str, s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| CliError::Config(format!("{field}: cannot read {s:?} as a fraction ({e})")))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// SHA-256 of the experiment id, seed and parameters. Output settings are excluded, so the
    /// same run written to two places carries the same digest.
    pub fn digest(&self, experiment: &str) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::json!({ "experiment": experiment, "seed": self.seed(), "params": self.params });
        hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_round_trips() {
        let text = r#"
experiment = "disk-ratio"
seed = 7

[output]
dir = "out"
plot = true

[params]
resolution = 500
disk = { center = [0.0, 0.0], radius = 0.5 }
maps = [
    { kind = "affine", matrix = [[2.0, 0.0], [0.0, 1.0]] },
    { kind = "mobius", a = [0.0, 0.0], b = [1.0, 0.0], c = [-1.0, 0.0], d = [1.0, 0.0] },
    { kind = "shear", profile = "abs" },
    { kind = "compose", maps = [{ kind = "radial_power", exponent = 2.0 }, { kind = "identity" }] },
]
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.seed(), 7);
        assert!(cfg.output.plot);
        let maps = cfg.params.maps.as_ref().unwrap();
        assert_eq!(maps.len(), 4);
        let h = maps[0].build().unwrap();
        assert_eq!(h.eval(Complex::new(1.0, 1.0)), Some(Complex::new(2.0, 1.0)));
        assert_eq!(maps[2].label(), "shear(abs,1)");
        assert_eq!(
            toml::to_string(&cfg)
                .ok()
                .and_then(|s| ExperimentConfig::from_toml(&s).ok()),
            Some(cfg)
        );
    }

    #[test]
    fn unknown_field_is_named() {
        let err = ExperimentConfig::from_toml("[params]\nradius = 3\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("radius"), "{err}");
        let err = ExperimentConfig::from_toml("seeed = 3\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("seeed"), "{err}");
    }

    #[test]
    fn wrong_type_is_named() {
        let err = ExperimentConfig::from_toml("[params]\nr = \"two\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("r ="), "{err}");
    }

    #[test]
    fn fractions_are_exact() {
        assert_eq!(
            parse_fraction("params.t", "3/8").unwrap(),
            Rational::new(3, 8)
        );
        let err = parse_fraction("params.t", "0.375").unwrap_err().to_string();
        assert!(err.contains("params.t"), "{err}");
    }

    #[test]
    fn digest_ignores_output_settings() {
        let mut a = ExperimentConfig::default();
        let mut b = a.clone();
        b.output.dir = Some("elsewhere".into());
        b.output.plot = true;
        assert_eq!(a.digest("tube"), b.digest("tube"));
        a.seed = Some(1);
        assert_ne!(a.digest("tube"), b.digest("tube"));
        assert_ne!(b.digest("tube"), b.digest("morse"));
    }

    #[test]
    fn set_specs_build() {
        let s = SetSpec::Interval {
            level: 3,
            a: "1/4".into(),
            b: "3/4".into(),
        }
        .build("params.sets")
        .unwrap();
        assert_eq!(s.len(), 4);
        let bad = SetSpec::Interval {
            level: 3,
            a: "x".into(),
            b: "1".into(),
        };
        assert!(bad
            .build("params.sets")
            .unwrap_err()
            .to_string()
            .contains("params.sets"));
    }
}
