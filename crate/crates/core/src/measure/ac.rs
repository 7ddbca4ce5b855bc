use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::covering::{Interval, PartialPartition};
use super::dyadic::{dyadic, DyadicSet, Rational};
use super::func::Func1D;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A nonnegative function of intervals `J = [a, b] ⊆ [0, 1]`.
pub trait IntervalFunction<T: Real>: Sync {
    fn eval(&self, a: T, b: T) -> T;
}

impl<T: Real, F: Fn(T, T) -> T + Sync> IntervalFunction<T> for F {
    fn eval(&self, a: T, b: T) -> T {
        self(a, b)
    }
}

/// `J_k(p) = [p − 2^{-k-1}, p + 2^{-k-1}] ∩ [0, 1]`.
pub fn centered_interval<T: Real>(p: T, k: u32) -> (T, T) {
    let h = T::lit((-(k as f64) - 1.0).exp2());
    ((p - h).max(T::zero()), (p + h).min(T::one()))
}

/// `A([0,1]) ≥ Σ A(J_j)` for intervals with disjoint interiors, up to `slack`.
pub fn superadditive_on<T: Real>(
    a: &impl IntervalFunction<T>,
    family: &[(T, T)],
    slack: T,
) -> Result<bool> {
    let mut sorted = family.to_vec();
    sorted.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    if sorted
        .iter()
        .any(|&(lo, hi)| !(lo >= T::zero() && lo <= hi && hi <= T::one()))
        || sorted.windows(2).any(|w| w[1].0 < w[0].1)
    {
        return Err(Error::InvalidFamily(
            "intervals must lie in [0, 1] with disjoint interiors".into(),
        ));
    }
    let sum = sorted
        .iter()
        .fold(T::zero(), |acc, &(lo, hi)| acc + a.eval(lo, hi));
    Ok(sum <= a.eval(T::zero(), T::one()) + slack)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StretchVerdict<T> {
    pub n: u32,
    /// The scale with the largest `A(J)/|J|` among those with `A(J) ≥ N|J|`.
    pub witness: Option<(u32, T)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StretchReport<T> {
    pub point: T,
    /// `A(J_k)/|J_k|` for each requested scale.
    pub ratios: Vec<(u32, T)>,
    pub verdicts: Vec<StretchVerdict<T>>,
    /// Smallest `N` with no `N`-stretched centered interval at the requested scales.
    pub stiff_at: Option<u32>,
}

impl<T> StretchReport<T> {
    pub fn stiff(&self) -> bool {
        self.stiff_at.is_some()
    }
}

/// For `N = 1..=n_max`, searches the centered intervals `J_k(p)` for one with `A(J) ≥ N|J|`.
pub fn stretch_classify<T: Real>(
    a: &impl IntervalFunction<T>,
    p: T,
    n_max: u32,
    scales: &[u32],
) -> Result<StretchReport<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::Precondition(format!("point {p} outside [0, 1]")));
    }
    let ratios: Vec<(u32, T)> = scales
        .iter()
        .map(|&k| {
            let (lo, hi) = centered_interval(p, k);
            (k, a.eval(lo, hi) / (hi - lo))
        })
        .collect();
    let verdicts: Vec<StretchVerdict<T>> = (1..=n_max)
        .map(|n| {
            let nn = T::from_u32(n).expect("fits");
            let witness = ratios.iter().filter(|(_, r)| *r >= nn).fold(
                None,
                |best: Option<(u32, T)>, &(k, r)| match best {
                    Some((_, br)) if br >= r => best,
                    _ => Some((k, r)),
                },
            );
            StretchVerdict { n, witness }
        })
        .collect();
    let stiff_at = verdicts.iter().find(|v| v.witness.is_none()).map(|v| v.n);
    Ok(StretchReport {
        point: p,
        ratios,
        verdicts,
        stiff_at,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusRow<T> {
    /// `δ = 2^{-k}`.
    pub k: u32,
    /// Largest `|I'| = Σ |f(b_i) − f(a_i)|` found with `|I| = δ`.
    pub sup: T,
    /// Level of the cells in the maximizing partition.
    pub level: u32,
    pub count: usize,
}

/// For each `δ = 2^{-k}`, the best partial partition into `2^{j-k}` level-`j` dyadic cells
/// (`k ≤ j ≤ max_level`), choosing the cells with the largest `|f(b) − f(a)|`. A lower bound
/// on the true modulus of absolute continuity.
pub fn ac_modulus<T: Real>(
    f: &impl Func1D<T>,
    deltas: &[u32],
    max_level: u32,
) -> Result<Vec<ModulusRow<T>>> {
    if max_level > 24 {
        return Err(Error::Precondition(format!(
            "max level {max_level} too fine"
        )));
    }
    if let Some(&k) = deltas.iter().find(|&&k| k > max_level) {
        return Err(Error::Precondition(format!(
            "δ = 2^-{k} is finer than level {max_level}"
        )));
    }
    let kmin = deltas.iter().copied().min().unwrap_or(max_level);
    // Prefix sums of the sorted jumps at each level.
    let prefix: Vec<Vec<T>> = (0..=max_level)
        .map(|j| {
            if j < kmin {
                return Vec::new();
            }
            let mut jumps = level_jumps(f, j);
            jumps.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
            let mut acc = T::zero();
            std::iter::once(T::zero())
                .chain(jumps.into_iter().map(|d| {
                    acc = acc + d;
                    acc
                }))
                .collect()
        })
        .collect();
    Ok(deltas
        .iter()
        .map(|&k| {
            let mut best = ModulusRow {
                k,
                sup: T::zero(),
                level: k,
                count: 1,
            };
            for (j, pre) in prefix.iter().enumerate().skip(k as usize) {
                let count = 1usize << (j as u32 - k);
                if pre[count] > best.sup {
                    best = ModulusRow {
                        k,
                        sup: pre[count],
                        level: j as u32,
                        count,
                    };
                }
            }
            best
        })
        .collect())
}

/// `|f(b) − f(a)|` over the level-`j` dyadic cells of `[0, 1]`.
pub fn level_jumps<T: Real>(f: &impl Func1D<T>, j: u32) -> Vec<T> {
    let n = 1usize << j;
    let nn = T::from_usize(n).expect("fits");
    let vals: Vec<T> = (0..=n)
        .map(|i| f.eval(T::from_usize(i).expect("fits") / nn))
        .collect();
    vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect()
}

/// The level-`n` Cantor staircase at a rational point, exactly.
pub fn cantor_exact(x: Rational, level: u32) -> Rational {
    let mut x = x.max(Rational::zero()).min(Rational::one());
    let (third, two_thirds) = (Rational::new(1, 3), Rational::new(2, 3));
    let mut offset = Rational::zero();
    let mut weight = Rational::one();
    let half = Rational::new(1, 2);
    for _ in 0..level {
        if x <= third {
            x *= 3;
        } else if x >= two_thirds {
            x = x * 3 - 2;
            offset += weight * half;
        } else {
            return offset + weight * half;
        }
        weight *= half;
    }
    offset + weight * x
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CantorWitness {
    pub partition: PartialPartition,
    /// `|I|`.
    pub length: Rational,
    /// `|I'|`.
    pub image_length: Rational,
}

/// The `2^n` intervals kept at stage `n` of the middle-thirds construction, with the exact
/// total length and the exact total rise of the level-`n` staircase across them.
pub fn cantor_witness(level: u32) -> Result<CantorWitness> {
    if level > 30 {
        return Err(Error::Precondition(format!("level {level} too deep")));
    }
    let width = Rational::new(1, 3i128.pow(level));
    let intervals = (0u64..1 << level)
        .map(|bits| {
            let lo = (0..level).fold(Rational::zero(), |acc, i| {
                let digit = if bits >> (level - 1 - i) & 1 == 1 {
                    2
                } else {
                    0
                };
                acc + Rational::new(digit, 3i128.pow(i + 1))
            });
            Interval::new(lo, lo + width)
        })
        .collect::<Result<Vec<_>>>()?;
    let partition = PartialPartition::new(intervals)?;
    let image_length = partition
        .intervals()
        .iter()
        .fold(Rational::zero(), |acc, iv| {
            acc + (cantor_exact(iv.hi, level) - cantor_exact(iv.lo, level)).abs()
        });
    Ok(CantorWitness {
        length: partition.total_length(),
        partition,
        image_length,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationReport {
    /// Sample values `f(i/2^r)`, exactly as evaluated.
    #[serde(skip)]
    pub samples: Vec<BigRational>,
    /// Running variation `v(f, [0, x_i])`.
    #[serde(skip)]
    pub f_plus: Vec<BigRational>,
    /// `f_plus − f + f(0)`.
    #[serde(skip)]
    pub f_minus: Vec<BigRational>,
    pub total_variation: f64,
    /// Discrete variation at resolutions `r−2`, `r−1`, `r`.
    pub variation_history: [f64; 3],
    pub monotone: bool,
    pub reconstructs: bool,
    /// Variation still growing at least half as fast under refinement as one level earlier.
    pub unbounded_suspect: bool,
}

/// Splits the sampled `f` into nondecreasing parts with `f_plus − f_minus = f − f(0)`.
///
/// Each floating sample is converted to the rational it denotes, so the running sums, the
/// monotonicity check and the reconstruction are exact.
pub fn variation_decompose<T: Real>(
    f: &impl Func1D<T>,
    resolution: u32,
) -> Result<VariationReport> {
    if !(2..=24).contains(&resolution) {
        return Err(Error::Precondition(format!(
            "resolution {resolution} outside 2..=24"
        )));
    }
    let n = 1usize << resolution;
    let nn = T::from_usize(n).expect("fits");
    let samples = (0..=n)
        .map(|i| {
            let v = f.eval(T::from_usize(i).expect("fits") / nn).to_f64_lossy();
            BigRational::from_float(v)
                .ok_or_else(|| Error::DegenerateSamples(format!("f sample {v} not finite")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut f_plus = Vec::with_capacity(n + 1);
    let mut f_minus = Vec::with_capacity(n + 1);
    let f0 = samples[0].clone();
    let mut acc = BigRational::zero();
    for (i, v) in samples.iter().enumerate() {
        if i > 0 {
            acc += (v - &samples[i - 1]).abs();
        }
        f_minus.push(&acc - v + &f0);
        f_plus.push(acc.clone());
    }
    let monotone =
        f_plus.windows(2).all(|w| w[0] <= w[1]) && f_minus.windows(2).all(|w| w[0] <= w[1]);
    let reconstructs = f_plus
        .iter()
        .zip(&f_minus)
        .zip(&samples)
        .all(|((p, m), v)| p - m == v - &f0);
    let coarse = |step: usize| {
        samples
            .iter()
            .step_by(step)
            .collect::<Vec<_>>()
            .windows(2)
            .fold(0.0, |a, w| {
                a + (w[1] - w[0]).abs().to_f64().unwrap_or(f64::NAN)
            })
    };
    let history = [coarse(4), coarse(2), acc.to_f64().unwrap_or(f64::NAN)];
    let (d1, d2) = (history[1] - history[0], history[2] - history[1]);
    let unbounded_suspect = d2 > 1e-9 * history[2].max(1.0) && d2 > 0.5 * d1;
    Ok(VariationReport {
        total_variation: history[2],
        samples,
        f_plus,
        f_minus,
        variation_history: history,
        monotone,
        reconstructs,
        unbounded_suspect,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferentiabilityProfile {
    /// Level-`level` cells whose midpoints are witnesses.
    pub witnesses: DyadicSet,
    pub measure: Rational,
}

/// Grid points `x` (cell midpoints at `level`) such that at every scale `k` some interval of
/// length `2^{-k}` containing `x` is `a`-shallow (`μ(f(I)) < a|I|`) and some such interval is
/// `b`-steep (`μ(f(I)) > b|I|`). The intervals tried start at `x − j·2^{-k}/8`, `j = 0..=8`.
pub fn differentiability_profile<T: Real>(
    f: &impl Func1D<T>,
    a: T,
    b: T,
    scales: &[u32],
    level: u32,
) -> Result<DifferentiabilityProfile> {
    if !(a >= T::zero() && a < b) {
        return Err(Error::Precondition("need 0 ≤ a < b".into()));
    }
    if level > 24 {
        return Err(Error::Precondition(format!("level {level} too fine")));
    }
    const OFFSETS: u32 = 8;
    let n = 1u32 << level;
    let nn = T::from_u32(n).expect("fits");
    let half = T::lit(0.5);
    let cells = (0..n).filter(|&i| {
        let x = (T::from_u32(i).expect("fits") + half) / nn;
        scales.iter().all(|&k| {
            let len = T::lit((-(k as f64)).exp2());
            let (mut shallow, mut steep) = (false, false);
            for q in 0..=OFFSETS {
                let lo =
                    x - len * T::from_u32(q).expect("fits") / T::from_u32(OFFSETS).expect("fits");
                let hi = lo + len;
                if lo < T::zero() || hi > T::one() {
                    continue;
                }
                let (fmin, fmax) = f.range(lo, hi);
                let q = (fmax - fmin) / len;
                shallow |= q < a;
                steep |= q > b;
            }
            shallow && steep
        })
    });
    let witnesses = DyadicSet::new(1, level, cells.map(|i| [i, 0]).collect::<Vec<_>>())?;
    let measure = super::dyadic::outer_measure(&witnesses);
    Ok(DifferentiabilityProfile { witnesses, measure })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageCover {
    /// Disjoint closed intervals covering `f(A)`, sorted.
    #[serde(skip)]
    pub cover: Vec<(BigRational, BigRational)>,
    pub pieces: usize,
    pub total_length: f64,
    #[serde(skip)]
    pub total_exact: BigRational,
    pub pass: bool,
}

/// Covers `f(A)` by the ranges `f(C)` of the cells `C` of `A`, merged; exact total length.
/// `pass` when the total is below `epsilon`.
pub fn image_null_check<T: Real>(
    f: &impl Func1D<T>,
    a: &DyadicSet,
    epsilon: T,
) -> Result<ImageCover> {
    if a.dim() != 1 {
        return Err(Error::InvalidSet(
            "image cover needs a one-dimensional set".into(),
        ));
    }
    let side = T::lit((-(a.level() as f64)).exp2());
    let mut ranges = a
        .cells()
        .iter()
        .map(|&[i, _]| {
            let lo = side * T::from_u32(i).expect("fits");
            let (m, x) = f.range(lo, lo + side);
            match (
                BigRational::from_float(m.to_f64_lossy()),
                BigRational::from_float(x.to_f64_lossy()),
            ) {
                (Some(m), Some(x)) => Ok((m, x)),
                _ => Err(Error::DegenerateSamples("non-finite range".into())),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ranges.sort();
    let mut cover: Vec<(BigRational, BigRational)> = Vec::new();
    for (lo, hi) in ranges {
        match cover.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => cover.push((lo, hi)),
        }
    }
    let total_exact = cover
        .iter()
        .fold(BigRational::zero(), |acc, (lo, hi)| acc + (hi - lo));
    let total_length = total_exact.to_f64().unwrap_or(f64::INFINITY);
    let eps = BigRational::from_float(epsilon.to_f64_lossy())
        .unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)));
    Ok(ImageCover {
        pieces: cover.len(),
        pass: total_exact < eps,
        cover,
        total_length,
        total_exact,
    })
}

/// The level-`level` cells on which the level-`cantor_level` staircase is constant.
pub fn cantor_gap_cells(cantor_level: u32, level: u32) -> Result<DyadicSet> {
    let side = dyadic(level);
    let cells = (0u32..1 << level).filter(|&i| {
        let lo = side * i as i128;
        cantor_exact(lo, cantor_level) == cantor_exact(lo + side, cantor_level)
    });
    DyadicSet::new(1, level, cells.map(|i| [i, 0]).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::StandardFunction;

    #[test]
    fn stretch_examples() {
        let length = |a: f64, b: f64| b - a;
        let r = stretch_classify(&length, 0.3, 3, &[1, 3, 5, 8]).unwrap();
        assert_eq!(r.stiff_at, Some(2));
        let sqrt = |a: f64, b: f64| (b - a).sqrt();
        let r = stretch_classify(&sqrt, 0.3, 10, &(1..=20).collect::<Vec<_>>()).unwrap();
        assert!(!r.stiff());
        assert!(r.verdicts.iter().all(|v| v.witness.is_some()));
        assert!(superadditive_on(&length, &[(0.0, 0.25), (0.5, 1.0)], 0.0).unwrap());
        assert!(!superadditive_on(&sqrt, &[(0.0, 0.25), (0.5, 1.0)], 0.0).unwrap());
        assert!(superadditive_on(&length, &[(0.0, 0.6), (0.5, 1.0)], 0.0).is_err());
    }

    #[test]
    fn modulus_examples() {
        let id = StandardFunction::<f64>::Identity;
        for row in ac_modulus(&id, &[2, 5, 8], 12).unwrap() {
            assert!((row.sup - (-(row.k as f64)).exp2()).abs() < 1e-15);
        }
        let sq = StandardFunction::<f64>::Square;
        for row in ac_modulus(&sq, &(2..=10).collect::<Vec<_>>(), 14).unwrap() {
            let d = (-(row.k as f64)).exp2();
            assert!(
                row.sup <= 2.0 * d && row.sup >= 2.0 * d - d * d - 1e-15,
                "{row:?}"
            );
        }
    }

    #[test]
    fn cantor_exact_matches_float() {
        for i in 0..=200 {
            let x = Rational::new(i, 200);
            let exact = cantor_exact(x, 6);
            let float = crate::measure::cantor_staircase(i as f64 / 200.0, 6);
            assert!((*exact.numer() as f64 / *exact.denom() as f64 - float).abs() < 1e-12);
        }
    }

    #[test]
    fn cantor_witness_level_ten() {
        let w = cantor_witness(10).unwrap();
        assert_eq!(w.partition.intervals().len(), 1024);
        assert_eq!(w.length, Rational::new(1 << 10, 3i128.pow(10)));
        assert_eq!(w.image_length, Rational::one());
    }

    #[test]
    fn variation_examples() {
        let inc = StandardFunction::<f64>::Square;
        let r = variation_decompose(&inc, 10).unwrap();
        assert!(r.monotone && r.reconstructs && r.f_minus.iter().all(Zero::is_zero));
        let abs = StandardFunction::AbsShift { center: 0.5 };
        let r = variation_decompose(&abs, 10).unwrap();
        assert!(r.monotone && r.reconstructs);
        assert_eq!(r.f_plus[1024], BigRational::one());
        assert_eq!(r.f_minus[1024], BigRational::one());
        let sin = StandardFunction::<f64>::SinCycle;
        let r = variation_decompose(&sin, 10).unwrap();
        assert!((r.total_variation - 2.0 / std::f64::consts::PI).abs() < 1e-6);
        assert!(!r.unbounded_suspect);
        let wild = |x: f64| if x == 0.0 { 0.0 } else { x * (1.0 / x).sin() };
        assert!(variation_decompose(&wild, 16).unwrap().unbounded_suspect);
    }

    #[test]
    fn differentiability_examples() {
        let id = StandardFunction::<f64>::Identity;
        assert!(differentiability_profile(&id, 0.5, 2.0, &[3, 5, 7], 8)
            .unwrap()
            .witnesses
            .is_empty());
        let abs = StandardFunction::AbsShift { center: 0.5 };
        let p = differentiability_profile(&abs, 0.5, 2.0, &[3, 5, 7], 8).unwrap();
        assert!(p.witnesses.is_empty());
    }

    #[test]
    fn cantor_witnesses_persist_under_refinement() {
        let f = StandardFunction::<f64>::Cantor { level: 10 };
        let gaps = cantor_gap_cells(10, 12).unwrap();
        for level in [8, 10, 12] {
            let p = differentiability_profile(&f, 0.5, 2.0, &[5, 6, 7, 8], level).unwrap();
            assert!(
                p.measure >= Rational::new(1, 32),
                "level {level}: {}",
                p.measure
            );
            // Witnesses sit within a scale-5 interval of the staircase's support.
            for &[i, _] in p.witnesses.cells() {
                let x = (i as f64 + 0.5) / (1u64 << level) as f64;
                let lo = ((x - 1.0 / 32.0).max(0.0) * 4096.0) as u32;
                let hi = (((x + 1.0 / 32.0).min(1.0) * 4096.0) as u32).min(4095);
                assert!((lo..=hi).any(|c| !gaps.contains_cell([c, 0])));
            }
        }
    }

    #[test]
    fn image_null_examples() {
        let unit = DyadicSet::full(1, 6).unwrap();
        let c = StandardFunction::Constant { value: 0.3 };
        assert_eq!(image_null_check(&c, &unit, 1e-9).unwrap().total_length, 0.0);
        let half = DyadicSet::interval(6, Rational::zero(), Rational::new(1, 2)).unwrap();
        let r = image_null_check(&StandardFunction::<f64>::Identity, &half, 1.0).unwrap();
        assert_eq!(r.total_exact, BigRational::new(1.into(), 2.into()));
        let gaps = cantor_gap_cells(10, 12).unwrap();
        assert!(gaps.len() > 3000);
        let r =
            image_null_check(&StandardFunction::<f64>::Cantor { level: 10 }, &gaps, 1e-2).unwrap();
        assert!(r.pass, "{}", r.total_length);
    }
}
