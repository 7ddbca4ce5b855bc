use num_complex::Complex;
use serde::Serialize;

use super::mobius::MobiusMap;
use super::point::{PointH3, SpherePoint};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cached shape of a geodesic: a vertical ray or a semicircle orthogonal to the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GeodesicShape<T> {
    Vertical { foot: Complex<T> },
    Semicircle { center: Complex<T>, radius: T },
}

/// An oriented complete geodesic, running from `start` to `end` on the sphere at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geodesic<T> {
    start: SpherePoint<T>,
    end: SpherePoint<T>,
    shape: GeodesicShape<T>,
}

impl<T: Real> Geodesic<T> {
    pub fn start(&self) -> SpherePoint<T> {
        self.start
    }

    pub fn end(&self) -> SpherePoint<T> {
        self.end
    }

    pub fn shape(&self) -> GeodesicShape<T> {
        self.shape
    }

    /// The vertical axis `{0} × (0, ∞)`, oriented upward.
    pub fn axis() -> Self {
        geodesic_from_endpoints(SpherePoint::real(T::zero()), SpherePoint::Infinity)
            .expect("distinct endpoints")
    }

    /// Unit-speed parametrization; see [`geodesic_point`].
    pub fn point(&self, s: T) -> Result<PointH3<T>> {
        geodesic_point(self, s)
    }

    /// Orientation-preserving isometry sending `start → 0` and `end → ∞`.
    pub fn straightening_map(&self) -> MobiusMap<T> {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        let m = match (self.start, self.end) {
            (SpherePoint::Finite(a), SpherePoint::Infinity) => MobiusMap::new(one, -a, zero, one),
            (SpherePoint::Infinity, SpherePoint::Finite(b)) => MobiusMap::new(zero, -one, one, -b),
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => MobiusMap::new(one, -a, one, -b),
            (SpherePoint::Infinity, SpherePoint::Infinity) => {
                unreachable!("endpoints are distinct")
            }
        };
        m.expect("distinct endpoints give an invertible map")
    }

    /// Image of this geodesic under an isometry.
    pub fn transform(&self, g: &MobiusMap<T>) -> Result<Self> {
        geodesic_from_endpoints(g.apply_sphere(self.start), g.apply_sphere(self.end))
    }
}

/// The geodesic with the given ideal endpoints.
pub fn geodesic_from_endpoints<T: Real>(
    a: SpherePoint<T>,
    b: SpherePoint<T>,
) -> Result<Geodesic<T>> {
    let shape = match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => return Err(Error::DegenerateGeodesic),
        (SpherePoint::Finite(foot), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(foot)) => GeodesicShape::Vertical { foot },
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => {
            let radius = (y - x).norm() / T::lit(2.0);
            if !(radius > T::zero()) || !radius.is_finite() {
                return Err(Error::DegenerateGeodesic);
            }
            GeodesicShape::Semicircle {
                center: (x + y) / T::lit(2.0),
                radius,
            }
        }
    };
    Ok(Geodesic {
        start: a,
        end: b,
        shape,
    })
}

/// Unit-speed parametrization with `s → −∞` at `start` and `s → +∞` at `end`.
///
/// Vertical geodesics are based at height 1; semicircles at their top point. On a semicircle
/// of radius `R` the point at parameter `s` is `(center + u R tanh s, R sech s)` where `u` is
/// the unit direction from `start` to `end`.
pub fn geodesic_point<T: Real>(gamma: &Geodesic<T>, s: T) -> Result<PointH3<T>> {
    match (gamma.start, gamma.end, gamma.shape) {
        (SpherePoint::Finite(_), SpherePoint::Infinity, GeodesicShape::Vertical { foot }) => {
            PointH3::new(foot, s.exp())
        }
        (SpherePoint::Infinity, SpherePoint::Finite(_), GeodesicShape::Vertical { foot }) => {
            PointH3::new(foot, (-s).exp())
        }
        (
            SpherePoint::Finite(a),
            SpherePoint::Finite(b),
            GeodesicShape::Semicircle { center, radius },
        ) => {
            let u = (b - a) / (b - a).norm();
            PointH3::new(center + u * (radius * s.tanh()), radius / s.cosh())
        }
        _ => unreachable!("shape cached consistently with endpoints"),
    }
}

/// Distance from `p` to `gamma`, with the nearest point of `gamma`.
pub fn dist_to_geodesic<T: Real>(p: &PointH3<T>, gamma: &Geodesic<T>) -> (T, PointH3<T>) {
    match gamma.shape {
        GeodesicShape::Vertical { foot } => {
            let w = (p.z() - foot).norm();
            let d = (w / p.t()).asinh();
            (d, PointH3::new_unchecked(foot, w.hypot(p.t())))
        }
        GeodesicShape::Semicircle { .. } => {
            let m = gamma.straightening_map();
            let q = m.apply_point(p);
            let d = (q.z().norm() / q.t()).asinh();
            let foot = PointH3::new_unchecked(Complex::new(T::zero(), T::zero()), q.norm());
            (d, m.inverse().apply_point(&foot))
        }
    }
}

/// The complete geodesic through two distinct interior points, oriented from `p` toward `q`.
pub fn geodesic_through<T: Real>(p: &PointH3<T>, q: &PointH3<T>) -> Result<Geodesic<T>> {
    // Rescale so that p = (0, 1); then q = (w, τ).
    let w = (q.z() - p.z()) / p.t();
    let tau = q.t() / p.t();
    let len = w.norm();
    if len <= T::lit(1e-12) * (T::one() + tau) {
        if (tau - T::one()).abs() <= T::epsilon() && len == T::zero() {
            return Err(Error::DegenerateGeodesic);
        }
        let foot = SpherePoint::Finite(p.z());
        return if tau > T::one() {
            geodesic_from_endpoints(foot, SpherePoint::Infinity)
        } else {
            geodesic_from_endpoints(SpherePoint::Infinity, foot)
        };
    }
    let u = w / len;
    // Circle through (0, 1) and (len, τ) centered on the boundary line; endpoints multiply to −1.
    let xc = (len * len + tau * tau - T::one()) / (T::lit(2.0) * len);
    let r = xc.hypot(T::one());
    let (xa, xb) = if xc >= T::zero() {
        let xb = xc + r;
        (-T::one() / xb, xb)
    } else {
        let xa = xc - r;
        (xa, -T::one() / xa)
    };
    let lift = |x: T| SpherePoint::Finite(p.z() + u * (x * p.t()));
    geodesic_from_endpoints(lift(xa), lift(xb))
}

/// A compact geodesic segment between two interior points, parametrized by arc length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicSegment<T> {
    start: PointH3<T>,
    end: PointH3<T>,
}

impl<T: Real> GeodesicSegment<T> {
    pub fn new(start: PointH3<T>, end: PointH3<T>) -> Result<Self> {
        if start.euclidean_distance(&end) <= T::epsilon() * (T::one() + start.norm()) {
            return Err(Error::DegenerateGeodesic);
        }
        Ok(Self { start, end })
    }

    /// The segment of `gamma` between parameters `s0 < s1`.
    pub fn on_geodesic(gamma: &Geodesic<T>, s0: T, s1: T) -> Result<Self> {
        Self::new(geodesic_point(gamma, s0)?, geodesic_point(gamma, s1)?)
    }

    pub fn start(&self) -> PointH3<T> {
        self.start
    }

    pub fn end(&self) -> PointH3<T> {
        self.end
    }

    pub fn length(&self) -> T {
        self.start.distance(&self.end)
    }

    pub fn transform(&self, g: &MobiusMap<T>) -> Self {
        Self {
            start: g.apply_point(&self.start),
            end: g.apply_point(&self.end),
        }
    }

    /// Points at arc-length parameters `0 = s₀ < … < s_{n−1} = length`, equally spaced, with
    /// `n ≥ max(min_count, ⌈length / spacing⌉ + 1)`.
    pub fn samples(&self, spacing: T, min_count: usize) -> Vec<PointH3<T>> {
        let gamma =
            geodesic_through(&self.start, &self.end).expect("segment endpoints are distinct");
        let m = gamma.straightening_map();
        let back = m.inverse();
        let base = m.apply_point(&self.start).t();
        let len = self.length();
        let by_spacing = (len / spacing).ceil().to_usize().unwrap_or(usize::MAX / 2) + 1;
        let n = min_count.max(by_spacing).max(2);
        let step = len / T::from_usize(n - 1).expect("sample count fits in scalar");
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == n - 1 {
                    return self.end;
                }
                let s = step * T::from_usize(i).expect("index fits");
                let on_axis =
                    PointH3::new_unchecked(Complex::new(T::zero(), T::zero()), base * s.exp());
                back.apply_point(&on_axis)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::dist_h3;
    use approx::assert_relative_eq;

    fn pt(x: f64, y: f64, t: f64) -> PointH3<f64> {
        PointH3::from_xyt(x, y, t).unwrap()
    }

    #[test]
    fn vertical_parametrization() {
        let g = Geodesic::<f64>::axis();
        for s in [-2.0, 0.0, 1.5] {
            let p = geodesic_point(&g, s).unwrap();
            assert_relative_eq!(p.t(), f64::exp(s), epsilon = 1e-14);
            assert_eq!(p.z(), Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn semicircle_top_and_shape() {
        let g = geodesic_from_endpoints(SpherePoint::real(-1.0), SpherePoint::real(1.0)).unwrap();
        let top = geodesic_point(&g, 0.0).unwrap();
        assert_relative_eq!(top.t(), 1.0);
        assert_relative_eq!(top.z().norm(), 0.0);
        let g = geodesic_from_endpoints(SpherePoint::real(1.0), SpherePoint::real(3.0)).unwrap();
        assert_eq!(
            g.shape(),
            GeodesicShape::Semicircle {
                center: Complex::new(2.0, 0.0),
                radius: 1.0
            }
        );
    }

    #[test]
    fn degenerate_endpoints_rejected() {
        assert_eq!(
            geodesic_from_endpoints(SpherePoint::real(1.0), SpherePoint::real(1.0)),
            Err(Error::DegenerateGeodesic)
        );
        assert_eq!(
            geodesic_from_endpoints(SpherePoint::<f64>::Infinity, SpherePoint::Infinity),
            Err(Error::DegenerateGeodesic)
        );
    }

    #[test]
    fn parametrization_tends_to_endpoints() {
        let g = geodesic_from_endpoints(
            SpherePoint::finite(0.5, 1.0),
            SpherePoint::finite(-2.0, 0.0),
        )
        .unwrap();
        let near_end = geodesic_point(&g, 30.0).unwrap();
        let near_start = geodesic_point(&g, -30.0).unwrap();
        assert!((near_end.z() - Complex::new(-2.0, 0.0)).norm() < 1e-9 && near_end.t() < 1e-9);
        assert!((near_start.z() - Complex::new(0.5, 1.0)).norm() < 1e-9 && near_start.t() < 1e-9);
    }

    #[test]
    fn distance_to_axis() {
        let axis = Geodesic::axis();
        let (d, foot) = dist_to_geodesic(&pt(1.0, 0.0, 1.0), &axis);
        assert_relative_eq!(d, 1f64.asinh(), epsilon = 1e-14);
        assert_relative_eq!(foot.t(), 2f64.sqrt(), epsilon = 1e-14);
        let (d, _) = dist_to_geodesic(&pt(0.0, 0.0, 3.0), &axis);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn distance_to_semicircle_matches_axis_transport() {
        let g = geodesic_from_endpoints(SpherePoint::real(0.0), SpherePoint::real(1.0)).unwrap();
        let (d, foot) = dist_to_geodesic(&pt(0.5, 0.0, 1.0), &g);
        assert_relative_eq!(d, 2f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(foot.t(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(dist_h3(&pt(0.5, 0.0, 1.0), &foot), d, epsilon = 1e-12);
    }

    #[test]
    fn geodesic_through_points_contains_both() {
        let cases = [
            (pt(0.0, 0.0, 1.0), pt(1.0, 0.5, 0.3)),
            (pt(0.0, 0.0, 1.0), pt(0.0, 0.0, 5.0)),
            (pt(2.0, 0.0, 4.0), pt(2.0, 0.0, 0.5)),
            (pt(-1.0, 3.0, 0.01), pt(4.0, 3.0, 0.02)),
        ];
        for (p, q) in cases {
            let g = geodesic_through(&p, &q).unwrap();
            assert!(dist_to_geodesic(&p, &g).0 < 1e-9, "{g:?}");
            assert!(dist_to_geodesic(&q, &g).0 < 1e-9, "{g:?}");
            // Orientation: p comes before q.
            let m = g.straightening_map();
            assert!(m.apply_point(&p).t() < m.apply_point(&q).t());
        }
    }

    #[test]
    fn segment_samples_are_evenly_spaced() {
        let seg = GeodesicSegment::new(pt(0.0, 0.0, 1.0), pt(3.0, 1.0, 0.2)).unwrap();
        let samples = seg.samples(0.01, 2);
        let len = seg.length();
        let step = len / (samples.len() - 1) as f64;
        assert!(step <= 0.01);
        for w in samples.windows(2) {
            assert_relative_eq!(dist_h3(&w[0], &w[1]), step, epsilon = 1e-9);
        }
    }
}
