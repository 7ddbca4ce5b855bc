use std::f64::consts::TAU;

use halfspace::measure::{stiff_line_ac_check, StiffLineOptions};
use halfspace::quasi::LinearStretch;
use halfspace::zoom::{
    asterisk_scan as scan, asterisk_test, default_directions, default_schedule,
    directional_derivative, disk_ratio as ratio_of, two_direction_check, zoom_step,
    DerivativeOptions, Disk, ScanGrid,
};
use halfspace::{Complex, DBoundaryHomeo};

use super::{info_row, row};
use crate::config::{AsteriskExpectation, MapSpec, Params};
use crate::error::{CliError, Result};
use crate::report::Row;

type C64 = Complex<f64>;

fn maps_or(
    p: &Params,
    default: impl FnOnce() -> Vec<MapSpec>,
) -> Result<Vec<(String, DBoundaryHomeo)>> {
    let specs = p.maps.clone().unwrap_or_else(default);
    if specs.is_empty() {
        return Err(CliError::Config(
            "params.maps: at least one map is required".into(),
        ));
    }
    specs.iter().map(|m| Ok((m.label(), m.build()?))).collect()
}

/// `8 × 8` points `ρ e^{iθ}` with `ρ = 1/8, …, 1` and `θ = 0, π/4, …`.
pub fn unit_disk_grid() -> Vec<C64> {
    (1..=8)
        .flat_map(|i| {
            (0..8).map(move |j| Complex::from_polar(i as f64 / 8.0, TAU * j as f64 / 8.0))
        })
        .collect()
}

pub(super) fn zoom(p: &Params) -> Result<Vec<Row>> {
    let maps = maps_or(p, || vec![MapSpec::mobius_real(0.0, 1.0, -1.0, 1.0)])?;
    let z = p
        .center
        .map(|[x, y]| Complex::new(x, y))
        .unwrap_or_default();
    let scales = p
        .scales_n
        .clone()
        .unwrap_or_else(|| (4..=10).map(|k| 1u64 << k).collect());
    if scales.is_empty() || scales.windows(2).any(|w| w[1] <= w[0]) || scales[0] == 0 {
        return Err(CliError::Config(
            "params.scales_n: need positive, strictly increasing scales".into(),
        ));
    }
    let final_bound = p.final_bound.unwrap_or(1e-2);
    let grid = unit_disk_grid();
    let opts = DerivativeOptions::default();
    let mut rows = vec![];
    for (label, h) in &maps {
        let hz = h.eval(z).ok_or_else(|| {
            CliError::Config(format!("params.center: {label} is not finite at {z}"))
        })?;
        let d1 = directional_derivative(h, z, Complex::new(1.0, 0.0), &default_schedule(), &opts)?;
        let di = directional_derivative(h, z, Complex::new(0.0, 1.0), &default_schedule(), &opts)?;
        let (Some(a), Some(b), true) = (d1.value, di.value, d1.converged && di.converged) else {
            rows.push(row(
                format!("{label} derivative"),
                0.0,
                0.0,
                false,
                "derivative at the center did not converge",
            ));
            continue;
        };
        let limit = |w: C64| hz + a * (w - z).re + b * (w - z).im;
        let mut previous: Option<f64> = None;
        for &n in &scales {
            let mut err = 0.0f64;
            for &o in &grid {
                err = err.max((zoom_step(h, z, n, z + o)? - limit(z + o)).norm());
            }
            let name = format!("{label} n={n}");
            match previous {
                None => rows.push(info_row(
                    name,
                    final_bound,
                    err,
                    "sup error on the unit-disk grid",
                )),
                Some(e) => rows.push(row(name, e, err, err < e, "sup error decreases in n")),
            }
            previous = Some(err);
        }
        let last = previous.expect("scales nonempty");
        rows.push(row(
            format!("{label} final"),
            final_bound,
            last,
            last <= final_bound,
            format!("D1={a} Di={b}"),
        ));
    }
    Ok(rows)
}

fn default_expectations() -> Vec<AsteriskExpectation> {
    vec![
        AsteriskExpectation {
            z: [0.0, 0.0],
            asterisk: false,
            d1: None,
        },
        AsteriskExpectation {
            z: [1.0, 0.0],
            asterisk: true,
            d1: Some([2.0, 0.0]),
        },
    ]
}

pub(super) fn asterisk_scan(p: &Params) -> Result<Vec<Row>> {
    let maps = maps_or(p, || vec![MapSpec::RadialPower { exponent: 2.0 }])?;
    let grid = p.grid.unwrap_or(ScanGrid {
        x0: -1.0,
        x1: 1.0,
        y0: -1.0,
        y1: 1.0,
        spacing: 0.5,
    });
    let tol = p.tol.unwrap_or(1e-6);
    let expectations = p.expect.clone().unwrap_or_else(default_expectations);
    let opts = DerivativeOptions::default();
    let directions = default_directions();
    let mut rows = vec![];
    for (label, h) in &maps {
        for r in scan(h, &grid, &directions, tol, &opts)? {
            let d1 = r.d1.map_or(0.0, |d| d.norm());
            rows.push(info_row(
                format!("{label} screen z={}", r.z),
                tol,
                d1,
                format!("asterisk={}", r.is_asterisk),
            ));
        }
        for e in &expectations {
            let r = asterisk_test(h, e.z(), &directions, tol, &opts)?;
            let name = format!("{label} expect z={}", e.z());
            let detail = format!(
                "asterisk={} expected={} d1={:?}",
                r.is_asterisk, e.asterisk, r.d1
            );
            match (e.asterisk, e.d1()) {
                (true, Some(want)) => {
                    let off = r.d1.map_or(f64::MAX, |d| (d - want).norm());
                    rows.push(row(name, 1e-6, off, r.is_asterisk && off <= 1e-6, detail));
                }
                (expected, _) => {
                    let d1 = r.d1.map_or(0.0, |d| d.norm());
                    rows.push(row(name, tol, d1, r.is_asterisk == expected, detail));
                }
            }
        }
    }
    Ok(rows)
}

/// How a map's two-direction verdict is checked.
enum LineClass {
    /// A similarity: both families good and the circle fit conformal.
    Conformal,
    /// A non-conformal real-affine map: both families good, circle residual at least 0.1.
    Affine,
    /// Anything else: two good families must come with a conformal fit.
    General,
}

fn classify(h: &DBoundaryHomeo) -> LineClass {
    if let Some(m) = h.as_mobius() {
        if m.coefficients()[2].norm() > 1e-12 {
            return LineClass::General;
        }
    }
    match h.as_real_affine() {
        Some(a) => {
            let m = a.matrix();
            let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
            let conformal = (m[0][0] - m[1][1]).abs() <= 1e-12 * scale
                && (m[0][1] + m[1][0]).abs() <= 1e-12 * scale;
            if conformal {
                LineClass::Conformal
            } else {
                LineClass::Affine
            }
        }
        None => LineClass::General,
    }
}

pub(super) fn good_lines(p: &Params) -> Result<Vec<Row>> {
    let maps = maps_or(p, || {
        vec![
            MapSpec::Identity,
            MapSpec::Mobius {
                a: [1.0, 2.0],
                b: [0.5, -1.0],
                c: [0.0, 0.0],
                d: [1.0, 0.0],
            },
            MapSpec::diag(2.0, 1.0),
            MapSpec::Affine {
                matrix: [[1.0, 0.5], [0.0, 1.0]],
                translation: Some([0.2, 0.0]),
            },
            MapSpec::Shear {
                profile: halfspace::zoom::ShearProfile::Abs,
                coefficient: None,
            },
            MapSpec::mobius_real(2.0, 1.0, 1.0, 1.0),
        ]
    })?;
    let center = p
        .center
        .map(|[x, y]| Complex::new(x, y))
        .unwrap_or(Complex::new(0.5, 0.5));
    let tol = p.tol.unwrap_or(1e-9);
    let samples = p.samples.unwrap_or(33);
    let offsets = [-0.5, 0.0, 0.5];
    let (d1, d2) = (Complex::new(1.0, 0.0), Complex::new(0.0, 1.0));
    let mut rows = vec![];
    for (label, h) in &maps {
        let r = two_direction_check(h, center, d1, d2, &offsets, samples, tol, 1e-6)?;
        let both = r.first_good && r.second_good;
        let residual = r.conformal.as_ref().map(|c| c.max_residual);
        let detail = format!(
            "good=({}, {}) worst_line_residual={:.3e} conformal_residual={residual:?}",
            r.first_good,
            r.second_good,
            r.worst_residual[0].max(r.worst_residual[1])
        );
        rows.push(match classify(h) {
            LineClass::Conformal => row(
                format!("{label} conformal"),
                1e-6,
                residual.unwrap_or(f64::MAX),
                both && r.is_conformal,
                detail,
            ),
            LineClass::Affine => {
                let res = residual.unwrap_or(0.0);
                row(
                    format!("{label} affine"),
                    0.1,
                    res,
                    both && res >= 0.1,
                    detail,
                )
            }
            LineClass::General => row(
                format!("{label} lemma"),
                1e-6,
                residual.unwrap_or(0.0),
                !both || r.is_conformal,
                detail,
            ),
        });
    }
    Ok(rows)
}

pub(super) fn disk_ratio(p: &Params) -> Result<Vec<Row>> {
    let maps = maps_or(p, || {
        vec![
            MapSpec::diag(2.0, 1.0),
            MapSpec::Identity,
            MapSpec::mobius_real(0.0, 1.0, -1.0, 1.0),
            MapSpec::mobius_real(2.0, 1.0, 1.0, 1.0),
            MapSpec::mobius_real(1.0, 0.0, 1.0, 2.0),
            MapSpec::Mobius {
                a: [0.0, 2.0],
                b: [1.0, 0.0],
                c: [0.0, 0.0],
                d: [1.0, 0.0],
            },
        ]
    })?;
    let disk = p.disk.unwrap_or(Disk {
        center: Complex::new(0.0, 0.0),
        radius: 0.5,
    });
    let resolution = p.resolution.unwrap_or(1000);
    let mut rows = vec![];
    for (label, h) in &maps {
        let r = ratio_of(h, &disk, resolution)?;
        let detail = format!(
            "inner={:.9} outer={:.9} boundary_points={}",
            r.inner, r.outer, r.boundary_points
        );
        if h.as_mobius().is_some() {
            rows.push(row(
                format!("{label} mobius"),
                1.0 + 1e-6,
                r.ratio,
                r.ratio <= 1.0 + 1e-6,
                detail,
            ));
        } else if let Some(a) = h.as_real_affine() {
            // The image of a disk is an ellipse with axis ratio σ₁/σ₂.
            let (s1, s2) = LinearStretch::new(a.matrix())?.singular_values();
            let sigma = s1.max(s2) / s1.min(s2);
            let ok = r.ratio >= sigma * (1.0 - 1e-9) && r.ratio <= sigma * 1.01;
            rows.push(row(
                format!("{label} affine"),
                sigma * 1.01,
                r.ratio,
                ok,
                format!("axis ratio={sigma}; {detail}"),
            ));
        } else {
            rows.push(info_row(
                format!("{label} ratio"),
                f64::MAX,
                r.ratio,
                detail,
            ));
        }
    }
    Ok(rows)
}

pub(super) fn stiff_line(p: &Params) -> Result<Vec<Row>> {
    let maps = maps_or(p, || {
        vec![
            MapSpec::Identity,
            MapSpec::diag(2.0, 1.0),
            MapSpec::mobius_real(1.0, 0.0, 1.0, 2.0),
        ]
    })?;
    let ys = p.y.clone().unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
    if let Some(y) = ys.iter().find(|y| !(0.0..=1.0).contains(*y)) {
        return Err(CliError::Config(format!(
            "params.y: heights must lie in [0, 1], got {y}"
        )));
    }
    let scales = p.scales.clone().unwrap_or_else(|| vec![2, 3, 4, 5]);
    let deltas = p.deltas.clone().unwrap_or_else(|| vec![2, 4, 6, 8, 10]);
    let mut rows = vec![];
    for (label, h) in &maps {
        for &y in &ys {
            let r = stiff_line_ac_check(
                h,
                y,
                Complex::new(1.0, 0.0),
                &scales,
                &deltas,
                StiffLineOptions::default(),
            )?;
            let worst = r
                .modulus
                .iter()
                .map(|m| m.sup / (r.sup_slope * (-(m.k as f64)).exp2()))
                .fold(0.0f64, f64::max);
            let detail = format!(
                "stiff_at={:?} sup_slope={:.9} consistent={}",
                r.stretch.stiff_at, r.sup_slope, r.consistent
            );
            rows.push(row(format!("{label} y={y}"), 1.05, worst, r.pass(), detail));
        }
    }
    Ok(rows)
}
