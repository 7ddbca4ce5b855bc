use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point `(z, t)` of upper half-space with `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointH3<T> {
    z: Complex<T>,
    t: T,
}

impl<T: Real> PointH3<T> {
    pub fn new(z: Complex<T>, t: T) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite() && t.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        if t <= T::zero() {
            return Err(Error::InvalidPoint(format!(
                "height must be positive, got {t}"
            )));
        }
        Ok(Self { z, t })
    }

    /// Convenience constructor from real coordinates `(x, y, t)`.
    pub fn from_xyt(x: T, y: T, t: T) -> Result<Self> {
        Self::new(Complex::new(x, y), t)
    }

    /// The point `(0, 1)`.
    pub fn origin() -> Self {
        Self {
            z: Complex::new(T::zero(), T::zero()),
            t: T::one(),
        }
    }

    pub(crate) fn new_unchecked(z: Complex<T>, t: T) -> Self {
        debug_assert!(t > T::zero() && t.is_finite(), "height {t} out of range");
        Self { z, t }
    }

    #[inline]
    pub fn z(&self) -> Complex<T> {
        self.z
    }

    #[inline]
    pub fn t(&self) -> T {
        self.t
    }

    /// Euclidean norm `‖(z, t)‖` in `R³`.
    pub fn norm(&self) -> T {
        self.z.norm().hypot(self.t)
    }

    /// Euclidean distance in `R³`.
    pub fn euclidean_distance(&self, other: &Self) -> T {
        (self.z - other.z).norm().hypot(self.t - other.t)
    }

    /// Hyperbolic distance to `other`.
    pub fn distance(&self, other: &Self) -> T {
        dist_h3(self, other)
    }

    pub fn is_finite(&self) -> bool {
        self.z.re.is_finite() && self.z.im.is_finite() && self.t.is_finite()
    }
}

/// A point of the Riemann sphere `C ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SpherePoint<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> SpherePoint<T> {
    pub fn finite(re: T, im: T) -> Self {
        SpherePoint::Finite(Complex::new(re, im))
    }

    pub fn real(x: T) -> Self {
        Self::finite(x, T::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex<T>> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn conj(self) -> Self {
        match self {
            SpherePoint::Finite(z) => SpherePoint::Finite(z.conj()),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    /// Embedding into the unit sphere of `R³` (stereographic projection).
    pub fn to_unit_sphere(&self) -> [T; 3] {
        match *self {
            SpherePoint::Infinity => [T::zero(), T::zero(), T::one()],
            SpherePoint::Finite(z) => {
                let r2 = z.norm_sqr();
                let d = T::one() + r2;
                let two = T::lit(2.0);
                [two * z.re / d, two * z.im / d, (r2 - T::one()) / d]
            }
        }
    }
}

impl<T: Real> From<Complex<T>> for SpherePoint<T> {
    fn from(z: Complex<T>) -> Self {
        SpherePoint::Finite(z)
    }
}

/// Chordal distance on the Riemann sphere (the unit-sphere embedding), in `[0, 2]`.
pub fn chordal_distance<T: Real>(a: &SpherePoint<T>, b: &SpherePoint<T>) -> T {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
        (SpherePoint::Finite(z), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
            T::lit(2.0) / (T::one() + z.norm_sqr()).sqrt()
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            T::lit(2.0) * (z - w).norm()
                / ((T::one() + z.norm_sqr()).sqrt() * (T::one() + w.norm_sqr()).sqrt())
        }
    }
}

/// Hyperbolic distance in the upper half-space model.
///
/// Uses `cosh d = 1 + (|z₁−z₂|² + (t₁−t₂)²) / (2 t₁ t₂)`, evaluated in the
/// half-angle form `d = 2 asinh(‖p−q‖_E / (2√(t₁t₂)))` which stays accurate for nearby points.
pub fn dist_h3<T: Real>(p: &PointH3<T>, q: &PointH3<T>) -> T {
    let chord = p.euclidean_distance(q);
    let two = T::lit(2.0);
    two * (chord / (two * (p.t * q.t).sqrt())).asinh()
}

/// Nearest-point projection onto the vertical axis `{0} × (0, ∞)`: `p ↦ (0, ‖p‖)`.
pub fn project_vertical<T: Real>(p: &PointH3<T>) -> PointH3<T> {
    PointH3::new_unchecked(Complex::new(T::zero(), T::zero()), p.norm())
}
