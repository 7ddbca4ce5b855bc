use num_complex::Complex;
use serde::Serialize;

use super::homeo::BoundaryHomeo;
use crate::error::{Error, Result};
use crate::hyperbolic::{chordal_distance, normalize_triple, MobiusMap, SpherePoint};
use crate::scalar::Real;

/// The segment `point + s·direction`, `s ∈ [−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct Line<T> {
    pub point: Complex<T>,
    pub direction: Complex<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineFit<T> {
    pub good: bool,
    /// `s ↦ alpha + beta·s`.
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
    pub max_residual: T,
}

/// Least-squares fit of `s ↦ h(point + s·direction)` by a complex affine function of `s` over
/// `samples` equally spaced parameters in `[−1, 1]`.
pub fn good_line_test<T: Real>(
    h: &BoundaryHomeo<T>,
    line: &Line<T>,
    samples: usize,
    tol: T,
) -> Result<LineFit<T>> {
    if samples < 3 {
        return Err(Error::Precondition(format!(
            "need at least 3 samples, got {samples}"
        )));
    }
    if line.direction.norm() == T::zero() {
        return Err(Error::Precondition("line direction must be nonzero".into()));
    }
    let last = T::from_usize(samples - 1).expect("fits");
    let two = T::lit(2.0);
    let pts = (0..samples)
        .map(|j| {
            let s = two * T::from_usize(j).expect("fits") / last - T::one();
            let z = line.point + line.direction * s;
            h.eval(z)
                .map(|w| (s, w))
                .ok_or_else(|| Error::Pole(format!("h({z}) = ∞")))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = T::from_usize(samples).expect("fits");
    let s_mean = pts.iter().fold(T::zero(), |a, (s, _)| a + *s) / n;
    let w_mean = pts
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |a, (_, w)| a + *w)
        / n;
    let (num, den) = pts.iter().fold(
        (Complex::new(T::zero(), T::zero()), T::zero()),
        |(num, den), (s, w)| {
            let ds = *s - s_mean;
            (num + (*w - w_mean) * ds, den + ds * ds)
        },
    );
    let beta = num / den;
    let alpha = w_mean - beta * s_mean;
    let max_residual = pts.iter().fold(T::zero(), |m, (s, w)| {
        m.max((*w - alpha - beta * *s).norm())
    });
    Ok(LineFit {
        good: max_residual < tol,
        alpha,
        beta,
        max_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalFit<T> {
    pub mobius: MobiusMap<T>,
    /// Largest chordal distance between `h(z_j)` and the fitted image of `z_j`.
    pub max_residual: T,
}

/// Interpolates a Möbius map through three well-spread samples, in both orientations, and
/// keeps the one with the smaller residual over all samples.
pub fn conformal_fit<T: Real>(
    h: &BoundaryHomeo<T>,
    points: &[Complex<T>],
) -> Result<ConformalFit<T>> {
    if points.len() < 4 {
        return Err(Error::DegenerateSamples(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    let images: Vec<SpherePoint<T>> = points
        .iter()
        .map(|z| h.apply(SpherePoint::Finite(*z)))
        .collect();
    let i0 = 0;
    let i1 = argmax(points, |z| (*z - points[i0]).norm());
    let i2 = argmax(points, |z| {
        (*z - points[i0]).norm().min((*z - points[i1]).norm())
    });
    let spread = (points[i2] - points[i0])
        .norm()
        .min((points[i2] - points[i1]).norm());
    if spread <= T::epsilon() * (points[i1] - points[i0]).norm() || i1 == i0 {
        return Err(Error::DegenerateSamples(
            "fewer than three distinct points".into(),
        ));
    }
    let src = |p: Complex<T>| SpherePoint::Finite(p);
    let target = normalize_triple(images[i0], images[i1], images[i2])?.inverse();
    let mut best: Option<ConformalFit<T>> = None;
    for flip in [false, true] {
        let conj = |z: Complex<T>| if flip { z.conj() } else { z };
        let norm = normalize_triple(
            src(conj(points[i0])),
            src(conj(points[i1])),
            src(conj(points[i2])),
        )?;
        let pre = if flip {
            norm.compose(&MobiusMap::conjugation())
        } else {
            norm
        };
        let mobius = target.compose(&pre);
        let max_residual = points.iter().zip(&images).fold(T::zero(), |m, (z, w)| {
            m.max(chordal_distance(&mobius.apply_sphere(src(*z)), w))
        });
        if best.as_ref().is_none_or(|b| max_residual < b.max_residual) {
            best = Some(ConformalFit {
                mobius,
                max_residual,
            });
        }
    }
    Ok(best.expect("two candidates"))
}

fn argmax<T: Real>(points: &[Complex<T>], key: impl Fn(&Complex<T>) -> T) -> usize {
    let mut best = (0, T::neg_infinity());
    for (i, z) in points.iter().enumerate() {
        let k = key(z);
        if k > best.1 {
            best = (i, k);
        }
    }
    best.0
}

const CIRCLE_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoDirectionReport<T> {
    pub first_good: bool,
    pub second_good: bool,
    pub worst_residual: [T; 2],
    /// Present when both direction families are good.
    pub conformal: Option<ConformalFit<T>>,
    /// `conformal` residual below `conformal_tol`.
    pub is_conformal: bool,
}

/// Tests the two families of parallel lines through `center + o·d_⊥` (`o` in `offsets`) in
/// directions `d1` and `d2`. When both families are good, fits a Möbius map on 64 points of
/// the unit circle about `center` and reports whether it is conformal.
#[allow(clippy::too_many_arguments)]
pub fn two_direction_check<T: Real>(
    h: &BoundaryHomeo<T>,
    center: Complex<T>,
    d1: Complex<T>,
    d2: Complex<T>,
    offsets: &[T],
    samples: usize,
    tol: T,
    conformal_tol: T,
) -> Result<TwoDirectionReport<T>> {
    let family = |d: Complex<T>| -> Result<(bool, T)> {
        let perp = Complex::new(-d.im, d.re) / d.norm();
        offsets
            .iter()
            .try_fold((true, T::zero()), |(good, worst), &o| {
                let fit = good_line_test(
                    h,
                    &Line {
                        point: center + perp * o,
                        direction: d,
                    },
                    samples,
                    tol,
                )?;
                Ok((good && fit.good, worst.max(fit.max_residual)))
            })
    };
    let (first_good, r1) = family(d1)?;
    let (second_good, r2) = family(d2)?;
    let conformal = if first_good && second_good {
        Some(conformal_fit(
            h,
            &circle_points(center, T::one(), CIRCLE_SAMPLES),
        )?)
    } else {
        None
    };
    let is_conformal = conformal
        .as_ref()
        .is_some_and(|c| c.max_residual < conformal_tol);
    Ok(TwoDirectionReport {
        first_good,
        second_good,
        worst_residual: [r1, r2],
        conformal,
        is_conformal,
    })
}

/// `n` equally spaced points on the circle of the given center and radius, starting at angle 0.
pub fn circle_points<T: Real>(center: Complex<T>, radius: T, n: usize) -> Vec<Complex<T>> {
    let nn = T::from_usize(n).expect("fits");
    (0..n)
        .map(|j| {
            center + Complex::from_polar(radius, T::TAU() * T::from_usize(j).expect("fits") / nn)
        })
        .collect()
}
