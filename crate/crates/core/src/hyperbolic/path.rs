use serde::Serialize;

use super::point::{dist_h3, PointH3};
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

/// A sampled path in upper half-space; consecutive samples are joined by Euclidean chords.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathH3<T> {
    samples: Vec<PointH3<T>>,
}

impl<T: Real> PathH3<T> {
    pub fn new(samples: Vec<PointH3<T>>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::PathTooShort(samples.len()));
        }
        if let Some(i) = samples.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::RepeatedSample(i + 1));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[PointH3<T>] {
        &self.samples
    }

    pub fn map(&self, f: impl Fn(&PointH3<T>) -> PointH3<T>) -> Vec<PointH3<T>> {
        self.samples.iter().map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathLengths<T> {
    /// Hyperbolic arc length `ℓ`.
    pub hyperbolic: T,
    /// Euclidean arc length `ℓ_E` (sum of chord lengths).
    pub euclidean: T,
}

/// Hyperbolic and Euclidean length of a sampled path.
pub fn path_lengths<T: Real>(path: &PathH3<T>) -> PathLengths<T> {
    let mut hyperbolic = T::zero();
    let mut euclidean = T::zero();
    for w in path.samples.windows(2) {
        hyperbolic = hyperbolic + chord_length(&w[0], &w[1]);
        euclidean = euclidean + w[0].euclidean_distance(&w[1]);
    }
    PathLengths {
        hyperbolic,
        euclidean,
    }
}

/// Hyperbolic length `∫ ds_E / t` of the Euclidean chord from `p` to `q`.
///
/// The height is affine along the chord, so the integral is `L ln(t₁/t₀) / (t₁ − t₀)`, written
/// as `(L / t₀) · ln(1 + r) / r` with `r = (t₁ − t₀)/t₀` to stay accurate for nearly level chords.
pub fn chord_length<T: Real>(p: &PointH3<T>, q: &PointH3<T>) -> T {
    let l = p.euclidean_distance(q);
    let r = (q.t() - p.t()) / p.t();
    let factor = if r.abs() < T::lit(1e-12) {
        T::one() - r / T::lit(2.0)
    } else {
        r.ln_1p() / r
    };
    l / p.t() * factor
}

/// Sum of the hyperbolic distances between successive points of the chord split into `n`
/// pieces, doubling `n` until the relative change falls below `tol.integration` or `n` reaches
/// `tol.max_segments`. Converges to [`chord_length`] from below.
pub fn chord_length_refined<T: Real>(p: &PointH3<T>, q: &PointH3<T>, tol: &Tolerances) -> T {
    let rel = T::lit(tol.integration);
    let mut n = 1usize;
    let mut prev = dist_h3(p, q);
    loop {
        n *= 2;
        let est = subdivided_sum(p, q, n);
        let done = (est - prev).abs() <= rel * est || n >= tol.max_segments;
        prev = est;
        if done {
            return est;
        }
    }
}

fn subdivided_sum<T: Real>(p: &PointH3<T>, q: &PointH3<T>, n: usize) -> T {
    let nt = T::from_usize(n).expect("segment count fits");
    let at = |i: usize| {
        if i == 0 {
            return *p;
        }
        if i == n {
            return *q;
        }
        let s = T::from_usize(i).expect("index fits") / nt;
        let z = p.z() + (q.z() - p.z()) * s;
        let t = p.t() + (q.t() - p.t()) * s;
        PointH3::new_unchecked(z, t)
    };
    let mut sum = T::zero();
    let mut prev = at(0);
    for i in 1..=n {
        let next = at(i);
        sum = sum + dist_h3(&prev, &next);
        prev = next;
    }
    sum
}
