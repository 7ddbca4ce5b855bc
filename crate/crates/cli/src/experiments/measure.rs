use halfspace::measure::{
    ac_modulus, besicovich_select, cantor_witness, fubini_check, outer_measure, porosity_check,
    variation_decompose, vitali_select, DyadicIntervals, DyadicSet, Interval, IntervalFamily,
    Rational, StandardFunction,
};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{info_row, row, stream_id, stream_rng};
use crate::config::{parse_fraction, Params, PorousExpect, SetSpec, Specimen};
use crate::error::{CliError, Result};
use crate::report::Row;

fn f(q: &Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn fractions(field: &str, values: &[String]) -> Result<Vec<Rational>> {
    values.iter().map(|s| parse_fraction(field, s)).collect()
}

fn level_or(p: &Params, default: u32, max: u32) -> Result<u32> {
    let level = p.level.unwrap_or(default);
    if level == 0 || level > max {
        return Err(CliError::Config(format!(
            "params.level: must be in 1..={max}, got {level}"
        )));
    }
    Ok(level)
}

/// A random subset of the level-`level` cells, each kept with probability `density`.
pub fn random_set(rng: &mut ChaCha8Rng, dim: u8, level: u32, density: f64) -> DyadicSet {
    let side = 1u32 << level;
    let rows = if dim == 2 { side } else { 1 };
    let cells: Vec<[u32; 2]> = (0..rows)
        .flat_map(|j| (0..side).map(move |i| [i, j]))
        .filter(|_| rng.random_bool(density))
        .collect();
    DyadicSet::new(dim, level, cells).expect("cells in range")
}

/// A random valid family: every target cell gets an interval centered at its midpoint that
/// contains it, and up to ten target cells get a second, independently sized interval.
pub fn random_family(rng: &mut ChaCha8Rng, level: u32) -> IntervalFamily {
    let density = rng.random_range(0.0..1.0);
    let target = random_set(rng, 1, level, density);
    let half = target.side() / 2;
    let mid = |i: u32| target.side() * i as i128 + half;
    let cells: Vec<u32> = target.cells().iter().map(|c| c[0]).collect();
    let mut intervals: Vec<Interval> = cells
        .iter()
        .map(|&i| {
            Interval::centered(mid(i), half * rng.random_range(1i128..=16)).expect("positive")
        })
        .collect();
    if !cells.is_empty() {
        for _ in 0..rng.random_range(0..=10) {
            let i = cells[rng.random_range(0..cells.len())];
            intervals.push(
                Interval::centered(mid(i), half * rng.random_range(1i128..=16)).expect("positive"),
            );
        }
    }
    IntervalFamily { intervals, target }
}

pub(super) fn besicovich(p: &Params, seed: u64) -> Result<Vec<Row>> {
    let count = p.count.unwrap_or(10_000);
    let level = level_or(p, 6, 16)?;
    let reports = (0..count)
        .into_par_iter()
        .map(|i| {
            let family = random_family(&mut stream_rng(seed, stream_id(0, i)), level);
            besicovich_select(&family).map(|r| (family.intervals.len(), r))
        })
        .collect::<halfspace::Result<Vec<_>>>()?;
    Ok(reports
        .into_iter()
        .enumerate()
        .map(|(i, (n, r))| {
            let detail = format!(
                "family={n} selected={} mu_S={} total={} disjoint={} members={} tripled_cover={}",
                r.selected.len(),
                r.target_measure,
                r.total_length,
                r.disjoint,
                r.members,
                r.tripled_cover
            );
            row(
                format!("family={i}"),
                f(&(r.target_measure / 3)),
                f(&r.total_length),
                r.pass(),
                detail,
            )
        })
        .collect())
}

fn default_vitali_sets() -> Vec<SetSpec> {
    vec![
        SetSpec::GapCantor {
            generations: 3,
            level: 6,
        },
        SetSpec::Interval {
            level: 6,
            a: "1/8".into(),
            b: "5/8".into(),
        },
        SetSpec::Full { dim: 1, level: 4 },
        SetSpec::Cells {
            dim: 1,
            level: 8,
            cells: vec![[0, 0], [3, 0], [4, 0], [100, 0], [255, 0]],
        },
    ]
}

pub(super) fn vitali(p: &Params, seed: u64) -> Result<Vec<Row>> {
    let epsilons = fractions(
        "params.epsilon",
        &p.epsilon
            .clone()
            .unwrap_or_else(|| vec!["1/16".into(), "1/64".into(), "1/256".into()]),
    )?;
    if epsilons.iter().any(|e| *e <= Rational::zero()) {
        return Err(CliError::Config(
            "params.epsilon: thresholds must be positive".into(),
        ));
    }
    let family = p.family.unwrap_or(DyadicIntervals::Alternate);
    let level = level_or(p, 6, 16)?;
    let mut sets: Vec<(String, DyadicSet)> = p
        .sets
        .clone()
        .unwrap_or_else(default_vitali_sets)
        .iter()
        .map(|s| Ok((s.label(), s.build("params.sets")?)))
        .collect::<Result<_>>()?;
    for i in 0..p.count.unwrap_or(8) {
        let mut rng = stream_rng(seed, stream_id(0, i));
        let density = rng.random_range(0.0..1.0);
        sets.push((
            format!("random(L={level},#{i})"),
            random_set(&mut rng, 1, level, density),
        ));
    }
    let mut rows = vec![];
    for (label, s) in &sets {
        if s.dim() != 1 {
            return Err(CliError::Config(format!(
                "params.sets: {label} is not one-dimensional"
            )));
        }
        for eps in &epsilons {
            let r = vitali_select(s, &family, *eps, 8)?;
            let detail = format!(
                "symdiff={} intervals={} scale=2^-{} finest=2^-{}",
                r.symdiff,
                r.intervals.len(),
                r.scale,
                r.finest
            );
            rows.push(row(
                format!("{label} eps={eps}"),
                f(eps),
                f(&r.symdiff),
                r.pass,
                detail,
            ));
        }
    }
    Ok(rows)
}

fn default_specimens() -> Vec<Specimen> {
    vec![
        Specimen {
            set: SetSpec::GapCantor {
                generations: 4,
                level: 8,
            },
            expect: Some(PorousExpect::All),
        },
        Specimen {
            set: SetSpec::Full { dim: 1, level: 8 },
            expect: Some(PorousExpect::None),
        },
    ]
}

pub(super) fn porosity(p: &Params) -> Result<Vec<Row>> {
    let delta = parse_fraction("params.delta", p.delta.as_deref().unwrap_or("1/4"))?;
    let scales = p.scales.clone().unwrap_or_else(|| vec![2, 4, 6]);
    let mut rows = vec![];
    for spec in p.specimens.clone().unwrap_or_else(default_specimens) {
        let s = spec.set.build("params.specimens")?;
        let verdicts = porosity_check(&s, delta, &scales)?;
        let porous = verdicts.iter().filter(|v| v.porous).count();
        let fraction = if verdicts.is_empty() {
            0.0
        } else {
            porous as f64 / verdicts.len() as f64
        };
        let detail = format!(
            "porous={porous} of {} mu={}",
            verdicts.len(),
            outer_measure(&s)
        );
        let label = format!("{} delta={delta}", spec.set.label());
        rows.push(match spec.expect {
            Some(PorousExpect::All) => row(label, 1.0, fraction, porous == verdicts.len(), detail),
            Some(PorousExpect::None) => row(label, 0.0, fraction, porous == 0, detail),
            None => info_row(label, 1.0, fraction, detail),
        });
    }
    Ok(rows)
}

/// Checks every `t` on each set and returns, per `t`, the violation count and how many sets
/// met the hypothesis.
fn fubini_counts(
    sets: impl ParallelIterator<Item = DyadicSet>,
    ts: &[Rational],
) -> Result<Vec<(usize, usize)>> {
    sets.map(|s| {
        ts.iter()
            .map(|t| {
                fubini_check(&s, *t).map(|r| (usize::from(!r.pass), usize::from(r.hypothesis)))
            })
            .collect::<halfspace::Result<Vec<_>>>()
    })
    .try_reduce(
        || vec![(0, 0); ts.len()],
        |a, b| {
            Ok(a.iter()
                .zip(&b)
                .map(|(x, y)| (x.0 + y.0, x.1 + y.1))
                .collect())
        },
    )
    .map_err(CliError::from)
}

pub(super) fn fubini(p: &Params, seed: u64) -> Result<Vec<Row>> {
    let ts = fractions(
        "params.t",
        &p.t.clone()
            .unwrap_or_else(|| vec!["1/4".into(), "1/2".into(), "3/4".into()]),
    )?;
    if ts
        .iter()
        .any(|t| *t <= Rational::zero() || *t > Rational::from_integer(1))
    {
        return Err(CliError::Config(
            "params.t: thresholds must lie in (0, 1]".into(),
        ));
    }
    let level = level_or(p, 6, 10)?;
    let count = p.count.unwrap_or(10_000);
    let exhaustive = (0u32..1 << 16).into_par_iter().map(|mask| {
        DyadicSet::new(
            2,
            2,
            (0..16)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| [b % 4, b / 4]),
        )
        .expect("cells in range")
    });
    let random = (0..count).into_par_iter().map(|i| {
        let mut rng = stream_rng(seed, stream_id(0, i));
        let density = rng.random_range(0.0f64..1.0).powi(3);
        random_set(&mut rng, 2, level, density)
    });
    let mut rows = vec![];
    for (name, n, counts) in [
        (
            "exhaustive L=2".to_string(),
            1usize << 16,
            fubini_counts(exhaustive, &ts)?,
        ),
        (
            format!("random L={level}"),
            count,
            fubini_counts(random, &ts)?,
        ),
    ] {
        for (t, (violations, hyp)) in ts.iter().zip(counts) {
            let detail = format!("sets={n} hypothesis_held={hyp}");
            rows.push(row(
                format!("{name} t={t}"),
                0.0,
                violations as f64,
                violations == 0,
                detail,
            ));
        }
    }
    Ok(rows)
}

/// Lipschitz constant on `[0, 1]`, where known in closed form.
fn lipschitz(f: &StandardFunction<f64>) -> Option<f64> {
    match f {
        StandardFunction::Identity
        | StandardFunction::AbsShift { .. }
        | StandardFunction::SinCycle => Some(1.0),
        StandardFunction::Square => Some(2.0),
        StandardFunction::Constant { .. } => Some(0.0),
        StandardFunction::Affine { slope, .. } => Some(slope.abs()),
        StandardFunction::Cantor { .. } | StandardFunction::Table(_) => None,
    }
}

fn function_label(f: &StandardFunction<f64>) -> String {
    match f {
        StandardFunction::Table(t) => format!("table({})", t.values().len()),
        other => serde_json::to_string(other)
            .unwrap_or_default()
            .replace('"', ""),
    }
}

pub(super) fn ac(p: &Params) -> Result<Vec<Row>> {
    let cantor_level = p.cantor_level.unwrap_or(10);
    let functions = p.functions.clone().unwrap_or_else(|| {
        vec![
            StandardFunction::Square,
            StandardFunction::AbsShift { center: 0.5 },
            StandardFunction::SinCycle,
            StandardFunction::Cantor { level: 10 },
        ]
    });
    let deltas = p.deltas.clone().unwrap_or_else(|| (2..=10).collect());
    let resolution = p.resolution_log2.unwrap_or(10);
    let mut rows = vec![];

    let w = cantor_witness(cantor_level)?;
    let expected = Rational::new(1 << cantor_level, 3i128.pow(cantor_level));
    rows.push(row(
        format!("cantor L={cantor_level} |I|"),
        f(&expected),
        f(&w.length),
        w.length == expected,
        format!(
            "exact |I|={} over {} intervals",
            w.length,
            w.partition.intervals().len()
        ),
    ));
    rows.push(row(
        format!("cantor L={cantor_level} |I'|"),
        1.0,
        f(&w.image_length),
        w.image_length == Rational::from_integer(1),
        format!("exact |I'|={}", w.image_length),
    ));

    for func in &functions {
        let label = function_label(func);
        for m in ac_modulus(func, &deltas, 16)? {
            let delta = (-(m.k as f64)).exp2();
            let detail = format!("level={} count={}", m.level, m.count);
            let name = format!("{label} modulus delta=2^-{}", m.k);
            rows.push(match lipschitz(func) {
                Some(l) => row(
                    name,
                    l * delta,
                    m.sup,
                    m.sup <= l * delta * (1.0 + 1e-12),
                    detail,
                ),
                None => info_row(name, delta, m.sup, detail),
            });
        }
        let v = variation_decompose(func, resolution)?;
        let f0 = &v.samples[0];
        let residual = v
            .samples
            .iter()
            .zip(v.f_plus.iter().zip(&v.f_minus))
            .map(|(s, (fp, fm))| (fp - fm - (s - f0)).abs())
            .max()
            .map_or(0.0, |r| r.to_f64().unwrap_or(f64::MAX));
        let detail = format!(
            "samples=2^{resolution} total_variation={:.12} monotone={} reconstructs={}",
            v.total_variation, v.monotone, v.reconstructs
        );
        rows.push(row(
            format!("{label} variation"),
            0.0,
            residual,
            v.monotone && v.reconstructs && residual == 0.0,
            detail,
        ));
    }
    Ok(rows)
}
