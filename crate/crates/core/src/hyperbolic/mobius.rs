use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::point::{PointH3, SpherePoint};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Preserving,
    /// The map is precomposed with complex conjugation.
    Reversing,
}

impl Orientation {
    fn then(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

/// A conformal map of the Riemann sphere, `z ↦ (az+b)/(cz+d)` with `ad − bc = 1`,
/// optionally precomposed with `z ↦ z̄`.
///
/// Acts on upper half-space by Poincaré extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawMobius<T>",
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub struct MobiusMap<T> {
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
    orientation: Orientation,
}

/// Unnormalized coefficients as they appear in configuration files.
#[derive(Deserialize)]
struct RawMobius<T> {
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
    #[serde(default)]
    orientation: Orientation,
}

impl<T: Real> TryFrom<RawMobius<T>> for MobiusMap<T> {
    type Error = Error;

    fn try_from(r: RawMobius<T>) -> Result<Self> {
        Self::with_orientation(r.a, r.b, r.c, r.d, r.orientation)
    }
}

impl<T: Real> MobiusMap<T> {
    /// Builds and normalizes `z ↦ (az+b)/(cz+d)`.
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        Self::with_orientation(a, b, c, d, Orientation::Preserving)
    }

    pub fn with_orientation(
        a: Complex<T>,
        b: Complex<T>,
        c: Complex<T>,
        d: Complex<T>,
        orientation: Orientation,
    ) -> Result<Self> {
        Self {
            a,
            b,
            c,
            d,
            orientation,
        }
        .normalized()
    }

    pub fn identity() -> Self {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
            orientation: Orientation::Preserving,
        }
    }

    /// `z ↦ az + b`, which acts on upper half-space as `(z, t) ↦ (az + b, |a| t)`.
    pub fn affine(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        Self::new(a, b, zero, one)
    }

    /// Homothety `z ↦ k z + b` with `k > 0`.
    pub fn homothety(k: T, b: Complex<T>) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(Error::DegenerateMobius(format!(
                "homothety factor must be positive, got {k}"
            )));
        }
        Self::affine(Complex::new(k, T::zero()), b)
    }

    /// Homothety fixing `center` and scaling distances by `k`.
    pub fn homothety_about(center: Complex<T>, k: T) -> Result<Self> {
        Self::homothety(k, center * (T::one() - k))
    }

    pub fn translation(b: Complex<T>) -> Self {
        Self::affine(Complex::new(T::one(), T::zero()), b).expect("translation is invertible")
    }

    /// `z ↦ −1/z`.
    pub fn inversion() -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        Self {
            a: zero,
            b: -one,
            c: one,
            d: zero,
            orientation: Orientation::Preserving,
        }
    }

    /// `z ↦ z̄`.
    pub fn conjugation() -> Self {
        Self {
            orientation: Orientation::Reversing,
            ..Self::identity()
        }
    }

    pub fn coefficients(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn det(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    fn normalized(self) -> Result<Self> {
        let det = self.det();
        let scale = self
            .a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm());
        if !det.re.is_finite() || !det.im.is_finite() || !(scale > T::zero()) {
            return Err(Error::DegenerateMobius("non-finite coefficients".into()));
        }
        if det.norm() <= T::epsilon() * scale * scale {
            return Err(Error::DegenerateMobius("ad - bc vanishes".into()));
        }
        let k = det.sqrt().inv();
        Ok(Self {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
            ..self
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        // A reversing outer map conjugates the inner coefficients: κ M κ = M̄.
        let (ia, ib, ic, id) = match self.orientation {
            Orientation::Preserving => (inner.a, inner.b, inner.c, inner.d),
            Orientation::Reversing => (
                inner.a.conj(),
                inner.b.conj(),
                inner.c.conj(),
                inner.d.conj(),
            ),
        };
        let m = Self {
            a: self.a * ia + self.b * ic,
            b: self.a * ib + self.b * id,
            c: self.c * ia + self.d * ic,
            d: self.c * ib + self.d * id,
            orientation: self.orientation.then(inner.orientation),
        };
        m.normalized()
            .expect("product of normalized maps is invertible")
    }

    pub fn inverse(&self) -> Self {
        let (a, b, c, d) = (self.d, -self.b, -self.c, self.a);
        let m = match self.orientation {
            Orientation::Preserving => Self {
                a,
                b,
                c,
                d,
                orientation: Orientation::Preserving,
            },
            // (Mκ)⁻¹ = κ M⁻¹ = conj(M⁻¹) κ
            Orientation::Reversing => Self {
                a: a.conj(),
                b: b.conj(),
                c: c.conj(),
                d: d.conj(),
                orientation: Orientation::Reversing,
            },
        };
        m.normalized()
            .expect("inverse of a normalized map is invertible")
    }

    /// Boundary action on the Riemann sphere.
    ///
    /// The image is `∞` exactly when `cz + d` vanishes relative to `az + b` at machine
    /// precision; otherwise the finite quotient is returned.
    pub fn apply_sphere(&self, p: SpherePoint<T>) -> SpherePoint<T> {
        let p = match self.orientation {
            Orientation::Preserving => p,
            Orientation::Reversing => p.conj(),
        };
        match p {
            SpherePoint::Infinity => {
                if self.c.norm() <= T::epsilon() * self.a.norm() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let num = self.a * z + self.b;
                let den = self.c * z + self.d;
                if den.norm() <= T::epsilon() * num.norm() {
                    return SpherePoint::Infinity;
                }
                let w = num / den;
                if w.re.is_finite() && w.im.is_finite() {
                    SpherePoint::Finite(w)
                } else {
                    SpherePoint::Infinity
                }
            }
        }
    }

    /// Boundary action on a finite point; `None` when the point is sent to `∞`.
    pub fn apply_complex(&self, z: Complex<T>) -> Option<Complex<T>> {
        self.apply_sphere(SpherePoint::Finite(z)).as_finite()
    }

    /// Poincaré extension to upper half-space.
    pub fn apply_point(&self, p: &PointH3<T>) -> PointH3<T> {
        let z = match self.orientation {
            Orientation::Preserving => p.z(),
            Orientation::Reversing => p.z().conj(),
        };
        let t = p.t();
        let cz_d = self.c * z + self.d;
        let t2 = t * t;
        let den = cz_d.norm_sqr() + self.c.norm_sqr() * t2;
        let num = (self.a * z + self.b) * cz_d.conj() + self.a * self.c.conj() * t2;
        PointH3::new_unchecked(num / den, t / den)
    }
}

/// Applies an isometry to an interior point.
pub fn apply_isometry<T: Real>(g: &MobiusMap<T>, p: &PointH3<T>) -> PointH3<T> {
    g.apply_point(p)
}

/// The orientation-preserving map sending `(a, b, c)` to `(0, 1, ∞)`.
pub fn normalize_triple<T: Real>(
    a: SpherePoint<T>,
    b: SpherePoint<T>,
    c: SpherePoint<T>,
) -> Result<MobiusMap<T>> {
    if a == b || b == c || a == c {
        return Err(Error::CoincidentPoints);
    }
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let (ma, mb, mc, md) = match (a, b, c) {
        (SpherePoint::Infinity, SpherePoint::Finite(z2), SpherePoint::Finite(z3)) => {
            (zero, z2 - z3, one, -z3)
        }
        (SpherePoint::Finite(z1), SpherePoint::Infinity, SpherePoint::Finite(z3)) => {
            (one, -z1, one, -z3)
        }
        (SpherePoint::Finite(z1), SpherePoint::Finite(z2), SpherePoint::Infinity) => {
            (one, -z1, zero, z2 - z1)
        }
        (SpherePoint::Finite(z1), SpherePoint::Finite(z2), SpherePoint::Finite(z3)) => {
            (z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
        }
        _ => return Err(Error::CoincidentPoints),
    };
    MobiusMap::new(ma, mb, mc, md).map_err(|_| Error::CoincidentPoints)
}
