//! Certified bi-Lipschitz self-maps of upper half-space and their boundary extensions.
//!
//! The non-isometric generator is the horizontal stretch `(z, t) ↦ (Az, t)`. Its pullback
//! metric `(|A dz|² + dt²)/t²` gives the exact constant `max(σ_max, 1/σ_min, 1)`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{dist_h3, geodesic_through, MobiusMap, PointH3, SpherePoint};
use crate::scalar::Real;
use crate::zoom::{BoundaryHomeo, HomeoPrimitive, RealAffine};

/// `(z, t) ↦ (Az, t)` for an invertible real `2 × 2` matrix `A` acting on `C = R²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearStretch<T> {
    matrix: [[T; 2]; 2],
    sigma_min: T,
    sigma_max: T,
}

impl<T: Real> LinearStretch<T> {
    pub fn new(matrix: [[T; 2]; 2]) -> Result<Self> {
        let affine = RealAffine::linear(matrix)?;
        let [[a, b], [c, d]] = affine.matrix();
        let det = (a * d - b * c).abs();
        let frob = a * a + b * b + c * c + d * d;
        let two = T::lit(2.0);
        let disc = (frob * frob - two * two * det * det).max(T::zero()).sqrt();
        let sigma_max = ((frob + disc) / two).sqrt();
        // σ_min σ_max = |det| is better conditioned than the difference formula.
        let sigma_min = det / sigma_max;
        Ok(Self {
            matrix,
            sigma_min,
            sigma_max,
        })
    }

    pub fn matrix(&self) -> [[T; 2]; 2] {
        self.matrix
    }

    pub fn singular_values(&self) -> (T, T) {
        (self.sigma_min, self.sigma_max)
    }

    pub fn bl_constant(&self) -> T {
        self.sigma_max.max(self.sigma_min.recip()).max(T::one())
    }

    fn affine(&self) -> RealAffine<T> {
        RealAffine::linear(self.matrix).expect("validated at construction")
    }

    pub fn apply_plane(&self, z: Complex<T>) -> Complex<T> {
        self.affine().apply(z)
    }

    pub fn apply(&self, p: &PointH3<T>) -> PointH3<T> {
        PointH3::new_unchecked(self.apply_plane(p.z()), p.t())
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.affine().inverse().matrix()).expect("inverse of an invertible matrix")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BLPrimitive<T> {
    Isometry(MobiusMap<T>),
    Stretch(LinearStretch<T>),
}

impl<T: Real> BLPrimitive<T> {
    fn bl_constant(&self) -> T {
        match self {
            BLPrimitive::Isometry(_) => T::one(),
            BLPrimitive::Stretch(s) => s.bl_constant(),
        }
    }

    fn apply(&self, p: &PointH3<T>) -> PointH3<T> {
        match self {
            BLPrimitive::Isometry(g) => g.apply_point(p),
            BLPrimitive::Stretch(s) => s.apply(p),
        }
    }

    fn inverse(&self) -> Self {
        match self {
            BLPrimitive::Isometry(g) => BLPrimitive::Isometry(g.inverse()),
            BLPrimitive::Stretch(s) => BLPrimitive::Stretch(s.inverse()),
        }
    }
}

/// A composition of primitives, applied left to right, with the product bound `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BLMap<T> {
    primitives: Vec<BLPrimitive<T>>,
    k: T,
}

impl<T: Real> BLMap<T> {
    pub fn identity() -> Self {
        Self {
            primitives: Vec::new(),
            k: T::one(),
        }
    }

    pub fn from_primitives(primitives: Vec<BLPrimitive<T>>) -> Self {
        let k = primitives.iter().fold(T::one(), |k, p| k * p.bl_constant());
        Self { primitives, k }
    }

    pub fn isometry(g: MobiusMap<T>) -> Self {
        Self::from_primitives(vec![BLPrimitive::Isometry(g)])
    }

    pub fn primitives(&self) -> &[BLPrimitive<T>] {
        &self.primitives
    }

    /// The certified constant: `K⁻¹ d(p, q) ≤ d(Hp, Hq) ≤ K d(p, q)`.
    pub fn k(&self) -> T {
        self.k
    }

    pub fn apply(&self, p: &PointH3<T>) -> PointH3<T> {
        self.primitives
            .iter()
            .fold(*p, |acc, prim| prim.apply(&acc))
    }

    pub fn inverse(&self) -> Self {
        Self {
            primitives: self
                .primitives
                .iter()
                .rev()
                .map(BLPrimitive::inverse)
                .collect(),
            k: self.k,
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Self {
        let mut primitives = self.primitives.clone();
        primitives.extend_from_slice(&next.primitives);
        Self {
            primitives,
            k: self.k * next.k,
        }
    }

    /// `post ∘ self ∘ pre` for isometries `pre`, `post`; the constant is unchanged.
    pub fn conjugated(&self, pre: &MobiusMap<T>, post: &MobiusMap<T>) -> Self {
        Self::isometry(*pre).then(self).then(&Self::isometry(*post))
    }
}

pub fn make_stretch<T: Real>(matrix: [[T; 2]; 2]) -> Result<BLMap<T>> {
    Ok(BLMap::from_primitives(vec![BLPrimitive::Stretch(
        LinearStretch::new(matrix)?,
    )]))
}

/// Concatenates the maps in order (the first is applied first).
pub fn compose_bl<T: Real>(maps: &[BLMap<T>]) -> Result<BLMap<T>> {
    let (first, rest) = maps.split_first().ok_or(Error::EmptyComposition)?;
    Ok(rest.iter().fold(first.clone(), |acc, m| acc.then(m)))
}

pub fn apply_bl<T: Real>(h: &BLMap<T>, p: &PointH3<T>) -> PointH3<T> {
    h.apply(p)
}

/// The exact boundary extension.
pub fn boundary_of_bl<T: Real>(h: &BLMap<T>) -> BoundaryHomeo<T> {
    let prims = h
        .primitives
        .iter()
        .map(|p| match p {
            BLPrimitive::Isometry(g) => HomeoPrimitive::Mobius(*g),
            BLPrimitive::Stretch(s) => HomeoPrimitive::RealAffine(s.affine()),
        })
        .collect();
    BoundaryHomeo::new(prims).expect("no radial primitives")
}

/// Pushes `(ζ, t)` (or `(0, 1/t)` when `ζ = ∞`) through `H` for each height and reports the
/// endpoint, on the side of that image, of the geodesic through it and the image of a fixed
/// reference point above `ζ`.
///
/// `H` carries the vertical geodesic at `ζ` to a quasi-geodesic ending at `h(ζ)`, so these
/// endpoints converge to `h(ζ)`; they are exact when `H` maps that geodesic to a geodesic
/// (isometries, single stretches). Images escaping to `∞` are reported as `∞`.
pub fn estimate_boundary_extension<T: Real>(
    h: &BLMap<T>,
    zeta: SpherePoint<T>,
    heights: &[T],
) -> Result<Vec<SpherePoint<T>>> {
    let lift = |t: T| match zeta {
        SpherePoint::Finite(z) => PointH3::new(z, t),
        SpherePoint::Infinity => PointH3::new(Complex::new(T::zero(), T::zero()), t.recip()),
    };
    heights
        .iter()
        .map(|&t| {
            if !(t > T::zero()) || !t.is_finite() {
                return Err(Error::Precondition(format!(
                    "heights must be positive, got {t}"
                )));
            }
            // Reference height 1, or 4 when the probe sits there.
            let reference = if (t - T::one()).abs() < T::lit(0.5) {
                T::lit(4.0)
            } else {
                T::one()
            };
            let q = h.apply(&lift(t)?);
            let anchor = h.apply(&lift(reference)?);
            match geodesic_through(&anchor, &q) {
                Ok(gamma) => Ok(gamma.end()),
                Err(_) => Ok(SpherePoint::Finite(q.z())),
            }
        })
        .collect()
}

/// Smallest and largest `d(Hp, Hq) / d(p, q)` over the given pairs.
pub fn distortion_range<T: Real>(h: &BLMap<T>, pairs: &[(PointH3<T>, PointH3<T>)]) -> (T, T) {
    pairs
        .iter()
        .fold((T::infinity(), T::zero()), |(lo, hi), (p, q)| {
            let d = dist_h3(p, q);
            if d == T::zero() {
                return (lo, hi);
            }
            let r = dist_h3(&h.apply(p), &h.apply(q)) / d;
            (lo.min(r), hi.max(r))
        })
}
