use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{MobiusMap, SpherePoint};
use crate::measure::cantor_staircase;
use crate::scalar::Real;

/// Profiles `g` for the shear `x + iy ↦ x + i(y + c·g(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShearProfile {
    /// `|x|`
    Abs,
    /// `x²`
    Square,
    /// `sin x`
    Sin,
    /// Level-10 Cantor staircase, clamped outside `[0, 1]`.
    Cantor,
}

impl ShearProfile {
    pub fn eval<T: Real>(self, x: T) -> T {
        match self {
            ShearProfile::Abs => x.abs(),
            ShearProfile::Square => x * x,
            ShearProfile::Sin => x.sin(),
            ShearProfile::Cantor => cantor_staircase(x, 10),
        }
    }
}

/// `v ↦ T v + w` for an invertible real-linear `T` on `C = R²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealAffine<T> {
    matrix: [[T; 2]; 2],
    translation: Complex<T>,
}

impl<T: Real> RealAffine<T> {
    pub fn new(matrix: [[T; 2]; 2], translation: Complex<T>) -> Result<Self> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        let scale = matrix
            .iter()
            .flatten()
            .fold(T::zero(), |m, v| m.max(v.abs()));
        if !det.is_finite() || det.abs() <= T::epsilon() * scale * scale {
            return Err(Error::SingularMatrix(det.to_f64_lossy()));
        }
        Ok(Self {
            matrix,
            translation,
        })
    }

    pub fn linear(matrix: [[T; 2]; 2]) -> Result<Self> {
        Self::new(matrix, Complex::new(T::zero(), T::zero()))
    }

    pub fn matrix(&self) -> [[T; 2]; 2] {
        self.matrix
    }

    pub fn translation(&self) -> Complex<T> {
        self.translation
    }

    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        let m = &self.matrix;
        Complex::new(
            m[0][0] * z.re + m[0][1] * z.im,
            m[1][0] * z.re + m[1][1] * z.im,
        ) + self.translation
    }

    pub fn inverse(&self) -> Self {
        let m = &self.matrix;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let inv = [
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ];
        let lin = Self {
            matrix: inv,
            translation: Complex::new(T::zero(), T::zero()),
        };
        Self {
            matrix: inv,
            translation: -lin.apply(self.translation),
        }
    }
}

/// One building block of a boundary homeomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum HomeoPrimitive<T> {
    Mobius(MobiusMap<T>),
    RealAffine(RealAffine<T>),
    /// `z ↦ z |z|^{a−1}` with `a > 0`.
    RadialPower {
        exponent: T,
    },
    /// `x + iy ↦ x + i(y + coefficient · g(x))`.
    Shear {
        profile: ShearProfile,
        coefficient: T,
    },
}

impl<T: Real> HomeoPrimitive<T> {
    fn apply(&self, p: SpherePoint<T>) -> SpherePoint<T> {
        match (self, p) {
            (HomeoPrimitive::Mobius(m), p) => m.apply_sphere(p),
            (_, SpherePoint::Infinity) => SpherePoint::Infinity,
            (HomeoPrimitive::RealAffine(a), SpherePoint::Finite(z)) => {
                SpherePoint::Finite(a.apply(z))
            }
            (HomeoPrimitive::RadialPower { exponent }, SpherePoint::Finite(z)) => {
                let r = z.norm();
                if r == T::zero() {
                    SpherePoint::Finite(z)
                } else {
                    SpherePoint::Finite(z * r.powf(*exponent - T::one()))
                }
            }
            (
                HomeoPrimitive::Shear {
                    profile,
                    coefficient,
                },
                SpherePoint::Finite(z),
            ) => SpherePoint::Finite(Complex::new(z.re, z.im + *coefficient * profile.eval(z.re))),
        }
    }

    fn inverse(&self) -> Self {
        match *self {
            HomeoPrimitive::Mobius(m) => HomeoPrimitive::Mobius(m.inverse()),
            HomeoPrimitive::RealAffine(a) => HomeoPrimitive::RealAffine(a.inverse()),
            HomeoPrimitive::RadialPower { exponent } => HomeoPrimitive::RadialPower {
                exponent: exponent.recip(),
            },
            HomeoPrimitive::Shear {
                profile,
                coefficient,
            } => HomeoPrimitive::Shear {
                profile,
                coefficient: -coefficient,
            },
        }
    }
}

/// A homeomorphism of the Riemann sphere built from primitives applied left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct BoundaryHomeo<T> {
    primitives: Vec<HomeoPrimitive<T>>,
}

impl<T: Real> BoundaryHomeo<T> {
    pub fn identity() -> Self {
        Self {
            primitives: Vec::new(),
        }
    }

    pub fn new(primitives: Vec<HomeoPrimitive<T>>) -> Result<Self> {
        for p in &primitives {
            if let HomeoPrimitive::RadialPower { exponent } = p {
                if !(*exponent > T::zero()) || !exponent.is_finite() {
                    return Err(Error::Precondition(format!(
                        "radial exponent must be positive, got {exponent}"
                    )));
                }
            }
        }
        Ok(Self { primitives })
    }

    pub fn mobius(m: MobiusMap<T>) -> Self {
        Self {
            primitives: vec![HomeoPrimitive::Mobius(m)],
        }
    }

    pub fn real_affine(a: RealAffine<T>) -> Self {
        Self {
            primitives: vec![HomeoPrimitive::RealAffine(a)],
        }
    }

    pub fn radial_power(exponent: T) -> Result<Self> {
        Self::new(vec![HomeoPrimitive::RadialPower { exponent }])
    }

    pub fn shear(profile: ShearProfile) -> Self {
        Self {
            primitives: vec![HomeoPrimitive::Shear {
                profile,
                coefficient: T::one(),
            }],
        }
    }

    pub fn primitives(&self) -> &[HomeoPrimitive<T>] {
        &self.primitives
    }

    /// Applies `self`, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        let mut primitives = self.primitives.clone();
        primitives.extend_from_slice(&next.primitives);
        Self { primitives }
    }

    pub fn push(&mut self, p: HomeoPrimitive<T>) {
        self.primitives.push(p);
    }

    pub fn inverse(&self) -> Self {
        Self {
            primitives: self
                .primitives
                .iter()
                .rev()
                .map(HomeoPrimitive::inverse)
                .collect(),
        }
    }

    pub fn apply(&self, p: SpherePoint<T>) -> SpherePoint<T> {
        self.primitives.iter().fold(p, |acc, prim| prim.apply(acc))
    }

    /// Image of a finite point, or `None` if it lands on `∞` (or overflows).
    pub fn eval(&self, z: Complex<T>) -> Option<Complex<T>> {
        match self.apply(SpherePoint::Finite(z)) {
            SpherePoint::Finite(w) if w.re.is_finite() && w.im.is_finite() => Some(w),
            _ => None,
        }
    }

    /// The single Möbius map this homeomorphism reduces to, if every primitive is one.
    pub fn as_mobius(&self) -> Option<MobiusMap<T>> {
        self.primitives
            .iter()
            .try_fold(MobiusMap::identity(), |acc, p| match p {
                HomeoPrimitive::Mobius(m) => Some(m.compose(&acc)),
                _ => None,
            })
    }

    /// The single real-affine map this homeomorphism reduces to, if every primitive is
    /// real-affine or a Möbius map fixing `∞`.
    pub fn as_real_affine(&self) -> Option<RealAffine<T>> {
        let mut acc = RealAffine::linear([[T::one(), T::zero()], [T::zero(), T::one()]]).ok()?;
        for p in &self.primitives {
            let step = match p {
                HomeoPrimitive::RealAffine(a) => *a,
                HomeoPrimitive::Mobius(m) => mobius_as_affine(m)?,
                _ => return None,
            };
            acc = compose_affine(&step, &acc);
        }
        Some(acc)
    }

    /// The point sent to `∞`, if finite.
    pub fn pole(&self) -> Option<Complex<T>> {
        self.inverse().apply(SpherePoint::Infinity).as_finite()
    }
}

fn mobius_as_affine<T: Real>(m: &MobiusMap<T>) -> Option<RealAffine<T>> {
    let [a, b, c, d] = m.coefficients();
    if c.norm() > T::epsilon() * a.norm() {
        return None;
    }
    let slope = a / d;
    let shift = b / d;
    let matrix = match m.orientation() {
        crate::hyperbolic::Orientation::Preserving => [[slope.re, -slope.im], [slope.im, slope.re]],
        crate::hyperbolic::Orientation::Reversing => [[slope.re, slope.im], [slope.im, -slope.re]],
    };
    RealAffine::new(matrix, shift).ok()
}

/// `outer ∘ inner`.
fn compose_affine<T: Real>(outer: &RealAffine<T>, inner: &RealAffine<T>) -> RealAffine<T> {
    let (p, q) = (outer.matrix, inner.matrix);
    let mut m = [[T::zero(); 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = p[i][0] * q[0][j] + p[i][1] * q[1][j];
        }
    }
    RealAffine {
        matrix: m,
        translation: outer.apply(inner.translation),
    }
}
