//! Verifiers for the Tube Lemma, the finite-segment deviation bound `C = 4K³ + 2K`, the Morse
//! constant `K' = C + 1` and the compact core of an ideal triangle.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{
    dist_to_geodesic, geodesic_from_endpoints, geodesic_point, geodesic_through, Geodesic,
    GeodesicSegment, PathH3, PointH3, SpherePoint,
};
use crate::quasi::{boundary_of_bl, BLMap};
use crate::scalar::Real;

/// Relative slack on the tube bound.
pub const TUBE_SLACK: f64 = 1e-3;
/// Absolute slack on deviation bounds.
pub const DEVIATION_SLACK: f64 = 1e-6;
/// Hyperbolic spacing of samples along geodesic segments.
pub const SEGMENT_SPACING: f64 = 0.01;

/// `C = 4K³ + 2K`.
pub fn deviation_constant<T: Real>(k: T) -> T {
    T::lit(4.0) * k * k * k + T::lit(2.0) * k
}

/// `K' = 4K³ + 2K + 1`.
pub fn morse_constant<T: Real>(k: T) -> T {
    deviation_constant(k) + T::one()
}

/// `e^{1−r}`.
pub fn tube_bound<T: Real>(r: T) -> T {
    (T::one() - r).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeReport<T> {
    pub r: T,
    /// `ℓ(β)`.
    pub path_length: T,
    /// `ℓ(φ∘β)`.
    pub projected_length: T,
    pub bound: T,
    pub ratio: T,
    pub pass: bool,
    /// Smallest distance from the path (chords included) to the axis.
    pub min_clearance: T,
    /// `min_clearance ≥ r`.
    pub valid: bool,
    pub euclidean_length: T,
    pub projected_euclidean_length: T,
    /// `ℓ_E(φ∘β) ≤ ℓ_E(β)`.
    pub euclidean_pass: bool,
}

/// Checks `ℓ(φ∘β) ≤ e^{1−r} ℓ(β)` for the projection `φ(p) = (0, ‖p‖)` onto the axis.
///
/// Along a chord `‖p‖` is the norm of an affine function, so it decreases to a single minimum
/// and then increases; the projected lengths are computed exactly from that minimum.
pub fn tube_check<T: Real>(path: &PathH3<T>, r: T) -> Result<TubeReport<T>> {
    if !(r > T::one()) {
        return Err(Error::Precondition(format!(
            "tube radius must exceed 1, got {r}"
        )));
    }
    let lengths = crate::hyperbolic::path_lengths(path);
    let mut projected = T::zero();
    let mut projected_e = T::zero();
    let mut min_ratio = T::infinity();
    for w in path.samples().windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let m = chord_min_norm(p, q);
        let (np, nq) = (p.norm(), q.norm());
        projected = projected + (np / m).ln() + (nq / m).ln();
        projected_e = projected_e + (np - m) + (nq - m);
        min_ratio = min_ratio.min(chord_min_axis_ratio(p, q));
    }
    let bound = tube_bound(r);
    let ratio = projected / lengths.hyperbolic;
    let min_clearance = min_ratio.asinh();
    Ok(TubeReport {
        r,
        path_length: lengths.hyperbolic,
        projected_length: projected,
        bound,
        ratio,
        pass: ratio <= bound * (T::one() + T::lit(TUBE_SLACK)),
        min_clearance,
        valid: min_clearance >= r,
        euclidean_length: lengths.euclidean,
        projected_euclidean_length: projected_e,
        euclidean_pass: projected_e <= lengths.euclidean * (T::one() + T::epsilon() * T::lit(16.0)),
    })
}

/// `min_{s ∈ [0,1]} ‖p + s(q − p)‖` in `R³`.
fn chord_min_norm<T: Real>(p: &PointH3<T>, q: &PointH3<T>) -> T {
    let dz = q.z() - p.z();
    let dt = q.t() - p.t();
    let len2 = dz.norm_sqr() + dt * dt;
    let s = (-((p.z().conj() * dz).re + p.t() * dt) / len2)
        .max(T::zero())
        .min(T::one());
    let z = p.z() + dz * s;
    z.norm().hypot(p.t() + dt * s)
}

/// `min_{s ∈ [0,1]} |z(s)| / t(s)` along the chord; its `asinh` is the distance to the axis.
fn chord_min_axis_ratio<T: Real>(p: &PointH3<T>, q: &PointH3<T>) -> T {
    let (a, b) = (p.z(), q.z() - p.z());
    let (c, d) = (p.t(), q.t() - p.t());
    let f = |s: T| (a + b * s).norm() / (c + d * s);
    let mut best = f(T::zero()).min(f(T::one()));
    // |a+bs|² = A + 2Bs + Cs²; the derivative of |a+bs|²/(c+ds)² vanishes where
    // (Bc − dA) + s(Cc − dB) = 0.
    let (aa, bb, cc) = (a.norm_sqr(), (a.conj() * b).re, b.norm_sqr());
    let den = cc * c - d * bb;
    if den != T::zero() {
        let s = (d * aa - bb * c) / den;
        if s > T::zero() && s < T::one() {
            best = best.min(f(s));
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseReport<T> {
    pub k: T,
    /// `4K³ + 2K`.
    pub c: T,
    /// The bound checked: `C` for segments, `C + 1` for windows.
    pub bound: T,
    pub observed_deviation: T,
    pub start: PointH3<T>,
    pub end: PointH3<T>,
    pub samples: usize,
    /// Image endpoints too close to span a geodesic; the deviation is reported as 0.
    pub degenerate: bool,
    pub pass: bool,
}

/// Largest distance from `H(α)` to the geodesic through `H(start)` and `H(end)`, over samples
/// of `α` at hyperbolic spacing at most 0.01 (and at least `samples` of them).
pub fn segment_deviation<T: Real>(
    h: &BLMap<T>,
    segment: &GeodesicSegment<T>,
    samples: usize,
) -> Result<MorseReport<T>> {
    if samples < 2 {
        return Err(Error::Precondition(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let pts = segment.samples(T::lit(SEGMENT_SPACING), samples);
    let images: Vec<PointH3<T>> = pts.iter().map(|p| h.apply(p)).collect();
    let k = h.k();
    let c = deviation_constant(k);
    let (observed, degenerate) = match geodesic_through(&images[0], &images[images.len() - 1]) {
        Ok(chord) => (max_deviation(&images, &chord), false),
        Err(Error::DegenerateGeodesic) => (T::zero(), true),
        Err(e) => return Err(e),
    };
    Ok(MorseReport {
        k,
        c,
        bound: c,
        observed_deviation: observed,
        start: segment.start(),
        end: segment.end(),
        samples: pts.len(),
        degenerate,
        pass: observed <= c + T::lit(DEVIATION_SLACK),
    })
}

fn max_deviation<T: Real>(points: &[PointH3<T>], gamma: &Geodesic<T>) -> T {
    points
        .iter()
        .fold(T::zero(), |m, p| m.max(dist_to_geodesic(p, gamma).0))
}

/// For each window radius `R`, the largest distance from `H(γ(s))`, `|s| ≤ R`, to the geodesic
/// `γ₂` joining the boundary images of the endpoints of `γ`, checked against `K' = C + 1`.
///
/// Windows share the parameter grid `s = j·0.01`, so each window's samples contain those of the
/// smaller ones and the reported deviations are nondecreasing.
pub fn morse_window_check<T: Real>(
    h: &BLMap<T>,
    gamma: &Geodesic<T>,
    radii: &[T],
) -> Result<Vec<MorseReport<T>>> {
    if radii.iter().any(|r| !(*r > T::zero())) || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition(
            "window radii must be positive and increasing".into(),
        ));
    }
    let boundary = boundary_of_bl(h);
    let gamma2 =
        geodesic_from_endpoints(boundary.apply(gamma.start()), boundary.apply(gamma.end()))?;
    let k = h.k();
    let c = deviation_constant(k);
    let bound = c + T::one();
    let step = T::lit(SEGMENT_SPACING);
    let mut reports = Vec::with_capacity(radii.len());
    let mut running = T::zero();
    let mut done: i64 = -1;
    for &radius in radii {
        let top = (radius / step).floor().to_i64().unwrap_or(0);
        for j in (done + 1)..=top {
            for s in [j, -j] {
                let p = geodesic_point(gamma, step * T::from_i64(s).expect("fits"))?;
                running = running.max(dist_to_geodesic(&h.apply(&p), &gamma2).0);
            }
        }
        done = top;
        reports.push(MorseReport {
            k,
            c,
            bound,
            observed_deviation: running,
            start: geodesic_point(gamma, -radius)?,
            end: geodesic_point(gamma, radius)?,
            samples: 2 * top as usize + 1,
            degenerate: false,
            pass: running <= bound + T::lit(DEVIATION_SLACK),
        });
    }
    Ok(reports)
}

/// A product grid: uniform in `Re z` and `Im z`, logarithmic in `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct CoreGrid<T> {
    pub re: (T, T, usize),
    pub im: (T, T, usize),
    pub t: (T, T, usize),
}

impl<T: Real> Default for CoreGrid<T> {
    fn default() -> Self {
        Self {
            re: (T::lit(-2.0), T::lit(3.0), 101),
            im: (T::lit(-2.0), T::lit(2.0), 81),
            t: (T::lit(1e-3), T::lit(1e3), 61),
        }
    }
}

impl<T: Real> CoreGrid<T> {
    fn axis(lo: T, hi: T, n: usize, i: usize) -> T {
        if n <= 1 {
            return lo;
        }
        lo + (hi - lo) * T::from_usize(i).expect("fits") / T::from_usize(n - 1).expect("fits")
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> PointH3<T> {
        let x = Self::axis(self.re.0, self.re.1, self.re.2, i);
        let y = Self::axis(self.im.0, self.im.1, self.im.2, j);
        let t = Self::axis(self.t.0.ln(), self.t.1.ln(), self.t.2, k).exp();
        PointH3::new_unchecked(Complex::new(x, y), t)
    }

    pub fn len(&self) -> usize {
        self.re.2 * self.im.2 * self.t.2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreReport<T> {
    /// Grid indices `(i, j, k)` of the members, in lexicographic order.
    pub members: Vec<[usize; 3]>,
    /// `(min, max)` of `Re z`, `Im z` and `t` over the members.
    pub bbox: [(T, T); 3],
    /// Largest hyperbolic distance between two corners of the bounding box.
    pub diameter: T,
}

/// The grid points within `R` of all three sides of the ideal triangle `0, 1, ∞`; `None` when
/// there are none.
pub fn triangle_core<T: Real>(radius: T, grid: &CoreGrid<T>) -> Result<Option<CoreReport<T>>> {
    if !(radius >= T::zero()) || grid.t.0 <= T::zero() || grid.t.1 <= T::zero() {
        return Err(Error::Precondition(
            "radius must be nonnegative and heights positive".into(),
        ));
    }
    let sides = [
        geodesic_from_endpoints(SpherePoint::real(T::zero()), SpherePoint::Infinity)?,
        geodesic_from_endpoints(SpherePoint::real(T::one()), SpherePoint::Infinity)?,
        geodesic_from_endpoints(SpherePoint::real(T::zero()), SpherePoint::real(T::one()))?,
    ];
    let (nj, nk) = (grid.im.2, grid.t.2);
    let members: Vec<[usize; 3]> = (0..grid.len())
        .into_par_iter()
        .filter_map(|flat| {
            let (i, j, k) = (flat / (nj * nk), (flat / nk) % nj, flat % nk);
            let p = grid.point(i, j, k);
            sides
                .iter()
                .all(|g| dist_to_geodesic(&p, g).0 <= radius)
                .then_some([i, j, k])
        })
        .collect();
    if members.is_empty() {
        return Ok(None);
    }
    let inf = (T::infinity(), T::neg_infinity());
    let mut bbox = [inf; 3];
    for &[i, j, k] in &members {
        let p = grid.point(i, j, k);
        for (b, v) in bbox.iter_mut().zip([p.z().re, p.z().im, p.t()]) {
            *b = (b.0.min(v), b.1.max(v));
        }
    }
    let corners: Vec<PointH3<T>> = (0..8)
        .map(|m| {
            let pick = |axis: usize| {
                if m >> axis & 1 == 0 {
                    bbox[axis].0
                } else {
                    bbox[axis].1
                }
            };
            PointH3::new_unchecked(Complex::new(pick(0), pick(1)), pick(2))
        })
        .collect();
    let diameter = corners
        .iter()
        .flat_map(|a| corners.iter().map(move |b| a.distance(b)))
        .fold(T::zero(), T::max);
    Ok(Some(CoreReport {
        members,
        bbox,
        diameter,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasi::make_stretch;
    use approx::assert_relative_eq;

    fn pt(x: f64, y: f64, t: f64) -> PointH3<f64> {
        PointH3::from_xyt(x, y, t).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(deviation_constant(1.0), 6.0);
        assert_eq!(deviation_constant(2.0), 36.0);
        assert_eq!(morse_constant(1.0), 7.0);
        assert_eq!(morse_constant(3.0), 115.0);
        assert_relative_eq!(tube_bound(2.0), (-1f64).exp());
    }

    #[test]
    fn horizontal_tube_path() {
        let samples: Vec<_> = (0..=100)
            .map(|i| pt(1.0 + i as f64 / 100.0, 0.0, 0.1))
            .collect();
        let path = PathH3::new(samples).unwrap();
        let rep = tube_check(&path, 2.99).unwrap();
        assert_relative_eq!(rep.path_length, 10.0, epsilon = 1e-7);
        assert_relative_eq!(
            rep.projected_length,
            0.5 * (4.01f64 / 1.01).ln(),
            epsilon = 1e-12
        );
        assert!(rep.valid && rep.pass && rep.euclidean_pass);
        assert_relative_eq!(rep.min_clearance, 10f64.asinh(), epsilon = 1e-12);
    }

    #[test]
    fn constant_norm_arc() {
        let samples: Vec<_> = (0..=2000)
            .map(|i| i as f64 / 2000.0)
            .map(|a| pt(a.cos(), a.sin(), 0.1))
            .collect();
        let rep = tube_check(&PathH3::new(samples).unwrap(), 2.0).unwrap();
        // The arc itself projects to a point; each chord dips by about δ²/8 in norm.
        assert!(
            rep.projected_length < 2e-4 && rep.ratio < 2e-5,
            "{}",
            rep.projected_length
        );
        assert!(rep.pass);
        assert!(tube_check(
            &PathH3::new(vec![pt(1.0, 0.0, 0.1), pt(2.0, 0.0, 0.1)]).unwrap(),
            1.0
        )
        .is_err());
    }

    #[test]
    fn chord_clearance_dips() {
        // The chord from (1, 1) to (−1, 1) passes over the axis.
        assert_eq!(
            chord_min_axis_ratio(&pt(1.0, 0.0, 1.0), &pt(-1.0, 0.0, 1.0)),
            0.0
        );
        assert_relative_eq!(
            chord_min_axis_ratio(&pt(1.0, 1.0, 1.0), &pt(-1.0, 1.0, 1.0)),
            1.0
        );
    }

    #[test]
    fn identity_and_stretch_deviation() {
        let seg = GeodesicSegment::new(pt(-1.0, 0.0, 0.5), pt(2.0, 1.0, 0.1)).unwrap();
        let rep = segment_deviation(&BLMap::identity(), &seg, 100).unwrap();
        assert!(rep.observed_deviation < 1e-7 && rep.pass && rep.bound == 6.0);
        let g = geodesic_from_endpoints(SpherePoint::real(-1.0), SpherePoint::real(1.0)).unwrap();
        let seg = GeodesicSegment::on_geodesic(&g, -3.0, 3.0).unwrap();
        let rep = segment_deviation(&make_stretch([[2.0, 0.0], [0.0, 1.0]]).unwrap(), &seg, 1000)
            .unwrap();
        assert!(
            rep.pass && rep.observed_deviation < 1.0,
            "{}",
            rep.observed_deviation
        );
    }

    #[test]
    fn windows() {
        let g = geodesic_from_endpoints(SpherePoint::real(-1.0), SpherePoint::real(1.0)).unwrap();
        let reps = morse_window_check(&BLMap::identity(), &g, &[2.0, 4.0, 8.0]).unwrap();
        assert!(reps
            .iter()
            .all(|r| r.observed_deviation < 1e-9 && r.bound == 7.0));
        let h = make_stretch([[3.0, 0.0], [0.0, 1.0]]).unwrap();
        let reps = morse_window_check(&h, &g, &[2.0, 4.0, 8.0]).unwrap();
        assert!(reps
            .windows(2)
            .all(|w| w[0].observed_deviation <= w[1].observed_deviation));
        assert!(reps
            .iter()
            .all(|r| r.pass && (r.bound - 115.0f64).abs() < 1e-9));
    }

    #[test]
    fn triangle_cores() {
        let grid = CoreGrid::<f64>::default();
        assert!(triangle_core(0.0, &grid).unwrap().is_none());
        let core = triangle_core(0.7, &grid).unwrap().unwrap();
        assert!(core.members.contains(&[50, 40, 30]));
        let p = grid.point(50, 40, 30);
        assert_relative_eq!(p.t(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.z().re, 0.5, epsilon = 1e-12);
        let big = triangle_core(10.0, &grid).unwrap().unwrap();
        assert!(big.diameter.is_finite());
        assert!(core
            .members
            .iter()
            .all(|m| big.members.binary_search(m).is_ok()));
    }
}
