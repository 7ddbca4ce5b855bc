//! Real functions on `[0, 1]`: a small registry of closed forms plus sampled tables.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A continuous function on `[0, 1]`.
pub trait Func1D<T: Real>: Sync {
    fn eval(&self, x: T) -> T;

    /// `(min, max)` of the function on `[a, b]`.
    ///
    /// The default samples 64 equal pieces; registry members override it with exact ranges.
    fn range(&self, a: T, b: T) -> (T, T) {
        const PIECES: usize = 64;
        let n = T::from_usize(PIECES).expect("small constant");
        (0..=PIECES).fold((T::infinity(), T::neg_infinity()), |(lo, hi), i| {
            let x = a + (b - a) * T::from_usize(i).expect("small index") / n;
            let y = self.eval(x);
            (lo.min(y), hi.max(y))
        })
    }
}

impl<T: Real, F: Fn(T) -> T + Sync> Func1D<T> for F {
    fn eval(&self, x: T) -> T {
        self(x)
    }
}

/// Piecewise-linear interpolation of values on the uniform grid `i / (n − 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTable<T> {
    values: Vec<T>,
}

impl<T: Real> SampleTable<T> {
    /// Needs at least two values.
    pub fn new(values: Vec<T>) -> Option<Self> {
        (values.len() >= 2).then_some(Self { values })
    }

    pub fn from_fn(f: &impl Func1D<T>, n: usize) -> Self {
        let n = n.max(2);
        let denom = T::from_usize(n - 1).expect("grid size fits");
        Self {
            values: (0..n)
                .map(|i| f.eval(T::from_usize(i).expect("fits") / denom))
                .collect(),
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    fn position(&self, x: T) -> (usize, T) {
        let segs = self.values.len() - 1;
        let u = x.max(T::zero()).min(T::one()) * T::from_usize(segs).expect("fits");
        let i = u.floor().to_usize().unwrap_or(0).min(segs - 1);
        (i, u - T::from_usize(i).expect("fits"))
    }
}

impl<T: Real> Func1D<T> for SampleTable<T> {
    fn eval(&self, x: T) -> T {
        let (i, frac) = self.position(x);
        self.values[i] + (self.values[i + 1] - self.values[i]) * frac
    }

    fn range(&self, a: T, b: T) -> (T, T) {
        let (ia, _) = self.position(a);
        let (ib, _) = self.position(b);
        let mut lo = self.eval(a).min(self.eval(b));
        let mut hi = self.eval(a).max(self.eval(b));
        for &v in &self.values[(ia + 1).min(self.values.len())..=ib.min(self.values.len() - 1)] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Closed-form members used as test specimens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StandardFunction<T> {
    Identity,
    /// `x ↦ x²`.
    Square,
    /// `x ↦ |x − center|`.
    AbsShift {
        center: T,
    },
    /// `x ↦ sin(2πx) / 2π`.
    SinCycle,
    /// Piecewise-linear Cantor staircase of the given level.
    Cantor {
        level: u32,
    },
    Constant {
        value: T,
    },
    Affine {
        slope: T,
        intercept: T,
    },
    Table(SampleTable<T>),
}

impl<T: Real> Func1D<T> for StandardFunction<T> {
    fn eval(&self, x: T) -> T {
        match self {
            StandardFunction::Identity => x,
            StandardFunction::Square => x * x,
            StandardFunction::AbsShift { center } => (x - *center).abs(),
            StandardFunction::SinCycle => (T::TAU() * x).sin() / T::TAU(),
            StandardFunction::Cantor { level } => cantor_staircase(x, *level),
            StandardFunction::Constant { value } => *value,
            StandardFunction::Affine { slope, intercept } => *slope * x + *intercept,
            StandardFunction::Table(t) => t.eval(x),
        }
    }

    fn range(&self, a: T, b: T) -> (T, T) {
        let (fa, fb) = (self.eval(a), self.eval(b));
        let ends = (fa.min(fb), fa.max(fb));
        match self {
            StandardFunction::Identity
            | StandardFunction::Cantor { .. }
            | StandardFunction::Constant { .. }
            | StandardFunction::Affine { .. } => ends,
            StandardFunction::Square => {
                if a <= T::zero() && T::zero() <= b {
                    (T::zero(), ends.1)
                } else {
                    ends
                }
            }
            StandardFunction::AbsShift { center } => {
                if a <= *center && *center <= b {
                    (T::zero(), ends.1)
                } else {
                    ends
                }
            }
            StandardFunction::SinCycle => {
                // Critical points at 1/4 + k/2.
                let half = T::lit(0.5);
                let quarter = T::lit(0.25);
                let mut k = ((a - quarter) / half).ceil();
                let (mut lo, mut hi) = ends;
                loop {
                    let x = quarter + k * half;
                    if x > b {
                        break;
                    }
                    let y = self.eval(x);
                    lo = lo.min(y);
                    hi = hi.max(y);
                    k = k + T::one();
                }
                (lo, hi)
            }
            StandardFunction::Table(t) => t.range(a, b),
        }
    }
}

/// The level-`level` piecewise-linear Cantor staircase, clamped to `[0, 1]` outside the unit
/// interval. It is constant on every removed middle third up to that level and linear with
/// rise `2^{-level}` on each of the `2^level` remaining intervals.
pub fn cantor_staircase<T: Real>(x: T, level: u32) -> T {
    let mut x = x.max(T::zero()).min(T::one());
    let third = T::one() / T::lit(3.0);
    let two_thirds = T::lit(2.0) * third;
    let three = T::lit(3.0);
    let half = T::lit(0.5);
    let mut offset = T::zero();
    let mut weight = T::one();
    for _ in 0..level {
        if x <= third {
            x = three * x;
        } else if x >= two_thirds {
            x = three * x - T::lit(2.0);
            offset = offset + weight * half;
        } else {
            return offset + weight * half;
        }
        weight = weight * half;
    }
    offset + weight * x.max(T::zero()).min(T::one())
}
