use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::homeo::BoundaryHomeo;
use crate::error::{Error, Result};
use crate::hyperbolic::MobiusMap;
use crate::scalar::Real;

/// The zoom `h_n = f_n ∘ h ∘ g_n` of `h` about `z`, where `g_n` fixes `z` and scales by `1/n`
/// and `f_n` fixes `h(z)` and scales by `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZoomStep<T> {
    base: BoundaryHomeo<T>,
    z: Complex<T>,
    n: u64,
    image: Complex<T>,
}

impl<T: Real> ZoomStep<T> {
    pub fn new(base: BoundaryHomeo<T>, z: Complex<T>, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("zoom scale must be at least 1".into()));
        }
        let image = base
            .eval(z)
            .ok_or_else(|| Error::Pole(format!("h({z}) = ∞")))?;
        Ok(Self { base, z, n, image })
    }

    pub fn center(&self) -> Complex<T> {
        self.z
    }

    pub fn scale(&self) -> u64 {
        self.n
    }

    fn n(&self) -> T {
        T::from_u64(self.n).expect("scale fits")
    }

    pub fn g_n(&self) -> MobiusMap<T> {
        MobiusMap::homothety_about(self.z, self.n().recip()).expect("positive scale")
    }

    pub fn f_n(&self) -> MobiusMap<T> {
        MobiusMap::homothety_about(self.image, self.n()).expect("positive scale")
    }

    /// `h_n(w)`. Evaluated in closed form so that `h_n(z) = h(z)` holds exactly.
    pub fn eval(&self, w: Complex<T>) -> Result<Complex<T>> {
        let n = self.n();
        let u = self.z + (w - self.z) / n;
        let hu = self
            .base
            .eval(u)
            .ok_or_else(|| Error::Pole(format!("h({u}) = ∞")))?;
        Ok(self.image + (hu - self.image) * n)
    }
}

pub fn zoom_step<T: Real>(
    h: &BoundaryHomeo<T>,
    z: Complex<T>,
    n: u64,
    w: Complex<T>,
) -> Result<Complex<T>> {
    ZoomStep::new(h.clone(), z, n)?.eval(w)
}

/// Knobs for the finite-difference derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeOptions {
    /// Residuals (successive differences of the quotients) must end below this.
    pub residual_tol: f64,
    /// Largest allowed gap `|q₊ − q₋|` between one-sided quotients, relative to `max(1, |D|)`.
    pub kink_tol: f64,
    /// Steps whose rounding floor exceeds this are not used.
    pub rounding_cap: f64,
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-7,
            kink_tol: 1e-4,
            rounding_cap: 1e-9,
        }
    }
}

/// `t_k = 2^{-k}` for `k = 4..=40`.
pub fn default_schedule<T: Real>() -> Vec<T> {
    (4..=40).map(|k| T::lit(2f64.powi(-k))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeEstimate<T> {
    /// Last central quotient, if any step could be evaluated.
    pub value: Option<Complex<T>>,
    /// Steps actually used.
    pub steps: Vec<T>,
    /// `|c_k − c_{k−1}|` for successive central quotients.
    pub residuals: Vec<T>,
    /// `|q₊ − q₋|` at the last step.
    pub one_sided_gap: T,
    pub converged: bool,
    /// Set when an evaluation hit a pole or overflowed.
    pub pole: bool,
}

/// `D_v h(z)` by dyadic difference quotients.
///
/// Central quotients carry the value; forward and backward quotients are compared at the
/// last step to catch one-sided kinks. Steps are dropped once rounding in `h` would dominate
/// the quotient (`ε·|h|/t` above `rounding_cap`), so the tail is never pure noise. A residual
/// sequence counts as decreasing when each term is at most its predecessor plus the two
/// rounding floors.
pub fn directional_derivative<T: Real>(
    h: &BoundaryHomeo<T>,
    z: Complex<T>,
    v: Complex<T>,
    schedule: &[T],
    opts: &DerivativeOptions,
) -> Result<DerivativeEstimate<T>> {
    if v.norm() == T::zero() {
        return Err(Error::Precondition("direction must be nonzero".into()));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) || schedule.iter().any(|t| !(*t > T::zero())) {
        return Err(Error::Precondition(
            "schedule must be positive and strictly decreasing".into(),
        ));
    }
    let mut est = DerivativeEstimate {
        value: None,
        steps: Vec::new(),
        residuals: Vec::new(),
        one_sided_gap: T::zero(),
        converged: false,
        pole: false,
    };
    let Some(h0) = h.eval(z) else {
        est.pole = true;
        return Ok(est);
    };
    let eps = T::epsilon();
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let cap = T::lit(opts.rounding_cap);
    let mut floors: Vec<T> = Vec::new();
    let mut last_gap = T::zero();
    for &t in schedule {
        let (Some(fp), Some(fm)) = (h.eval(z + v * t), h.eval(z - v * t)) else {
            est.pole = true;
            break;
        };
        let floor = four * eps * (fp.norm() + fm.norm() + two * h0.norm()) / t;
        if floor > cap && est.steps.len() >= 4 {
            break;
        }
        let central = (fp - fm) / (two * t);
        if !(central.re.is_finite() && central.im.is_finite()) {
            est.pole = true;
            break;
        }
        if let Some(prev) = est.value {
            est.residuals.push((central - prev).norm());
        }
        last_gap = ((fp - h0) / t - (h0 - fm) / t).norm();
        est.value = Some(central);
        est.steps.push(t);
        floors.push(floor);
    }
    est.one_sided_gap = last_gap;
    let Some(value) = est.value else {
        return Ok(est);
    };
    let tol = T::lit(opts.residual_tol);
    let r = &est.residuals;
    let tail_ok = r.len() >= 3 && {
        let n = r.len();
        (n - 3..n).all(|i| r[i] < tol)
            && (n - 2..n).all(|i| r[i] <= r[i - 1] + floors[i + 1] + floors[i])
    };
    let kink_ok = last_gap <= T::lit(opts.kink_tol) * value.norm().max(T::one());
    est.converged = !est.pole && tail_ok && kink_ok;
    Ok(est)
}

/// `{1, i, 1+i, 1−i, 2+i, 1+2i}`, each scaled to unit length.
pub fn default_directions<T: Real>() -> Vec<Complex<T>> {
    [
        (1.0, 0.0),
        (0.0, 1.0),
        (1.0, 1.0),
        (1.0, -1.0),
        (2.0, 1.0),
        (1.0, 2.0),
    ]
    .iter()
    .map(|&(x, y)| {
        let v = Complex::new(T::lit(x), T::lit(y));
        v / v.norm()
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsteriskReport<T> {
    pub z: Complex<T>,
    pub is_asterisk: bool,
    /// `D_1 h(z)` when it converged.
    pub d1: Option<Complex<T>>,
    pub estimates: Vec<(Complex<T>, DerivativeEstimate<T>)>,
}

/// Whether every requested directional derivative converges and `|D_1 h(z)| > tol`.
pub fn asterisk_test<T: Real>(
    h: &BoundaryHomeo<T>,
    z: Complex<T>,
    directions: &[Complex<T>],
    tol: T,
    opts: &DerivativeOptions,
) -> Result<AsteriskReport<T>> {
    let one = Complex::new(T::one(), T::zero());
    let i1 = directions
        .iter()
        .position(|v| (*v - one).norm() <= T::epsilon())
        .ok_or_else(|| Error::Precondition("directions must include 1".into()))?;
    let schedule = default_schedule();
    let estimates = directions
        .iter()
        .map(|&v| directional_derivative(h, z, v, &schedule, opts).map(|e| (v, e)))
        .collect::<Result<Vec<_>>>()?;
    let d1 = estimates[i1]
        .1
        .converged
        .then(|| estimates[i1].1.value)
        .flatten();
    let all = estimates.iter().all(|(_, e)| e.converged);
    let is_asterisk = all && d1.is_some_and(|d| d.norm() > tol);
    Ok(AsteriskReport {
        z,
        is_asterisk,
        d1,
        estimates,
    })
}

/// An axis-aligned grid `x0 + i·spacing`, `y0 + j·spacing` covering `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ScanGrid<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
    pub spacing: T,
}

impl<T: Real> ScanGrid<T> {
    /// Row-major points (`y` outer, `x` inner).
    pub fn points(&self) -> Result<Vec<Complex<T>>> {
        if !(self.spacing > T::zero()) || self.x1 < self.x0 || self.y1 < self.y0 {
            return Err(Error::Precondition(
                "grid needs positive spacing and ordered bounds".into(),
            ));
        }
        let count = |a: T, b: T| {
            ((b - a) / self.spacing + T::lit(1e-9))
                .floor()
                .to_usize()
                .unwrap_or(0)
                + 1
        };
        let (nx, ny) = (count(self.x0, self.x1), count(self.y0, self.y1));
        let at = |a: T, k: usize| a + self.spacing * T::from_usize(k).expect("fits");
        Ok((0..ny)
            .flat_map(|j| (0..nx).map(move |i| Complex::new(at(self.x0, i), at(self.y0, j))))
            .collect())
    }
}

/// Runs [`asterisk_test`] on every grid point, in parallel, returning reports in grid order.
pub fn asterisk_scan<T: Real>(
    h: &BoundaryHomeo<T>,
    grid: &ScanGrid<T>,
    directions: &[Complex<T>],
    tol: T,
    opts: &DerivativeOptions,
) -> Result<Vec<AsteriskReport<T>>> {
    grid.points()?
        .into_par_iter()
        .map(|z| asterisk_test(h, z, directions, tol, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoom::{RealAffine, ShearProfile};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn zoom_of_affine_is_constant() {
        let h = BoundaryHomeo::mobius(MobiusMap::affine(c(1.5, -0.5), c(0.2, 1.0)).unwrap());
        let z = c(0.3, -0.7);
        for n in [1, 10, 1000] {
            assert_eq!(zoom_step(&h, z, n, z).unwrap(), h.eval(z).unwrap());
            let w = c(1.1, 0.4);
            let expected = h.eval(z).unwrap() + c(1.5, -0.5) * (w - z);
            assert!((zoom_step(&h, z, n, w).unwrap() - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn zoom_of_pole_map() {
        let h = BoundaryHomeo::mobius(
            MobiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)).unwrap(),
        );
        let w = zoom_step(&h, c(0.0, 0.0), 1000, c(0.5, 0.0)).unwrap();
        assert!((w - c(1.5, 0.0)).norm() < 5e-3);
        let step = ZoomStep::new(h, c(0.0, 0.0), 4).unwrap();
        assert!((step.g_n().apply_complex(c(1.0, 0.0)).unwrap() - c(0.25, 0.0)).norm() < 1e-15);
        assert!((step.f_n().apply_complex(c(2.0, 0.0)).unwrap() - c(5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn derivative_of_affine() {
        let a = c(2.0, 1.0);
        let h = BoundaryHomeo::mobius(MobiusMap::affine(a, c(3.0, 0.0)).unwrap());
        let v = c(0.6, 0.8);
        let e = directional_derivative(
            &h,
            c(0.5, 0.25),
            v,
            &default_schedule(),
            &Default::default(),
        )
        .unwrap();
        assert!(e.converged);
        assert!((e.value.unwrap() - a * v).norm() < 1e-9);
    }

    #[test]
    fn radial_power_derivatives() {
        let h = BoundaryHomeo::radial_power(2.0).unwrap();
        let s = default_schedule();
        let e =
            directional_derivative(&h, c(1.0, 0.0), c(1.0, 0.0), &s, &Default::default()).unwrap();
        assert!(e.converged, "{e:?}");
        assert!((e.value.unwrap() - c(2.0, 0.0)).norm() < 1e-6);
        let e =
            directional_derivative(&h, c(0.0, 0.0), c(0.6, 0.8), &s, &Default::default()).unwrap();
        assert!(e.converged);
        assert!(e.value.unwrap().norm() < 1e-9);
    }

    #[test]
    fn kink_is_not_converged() {
        let h = BoundaryHomeo::<f64>::shear(ShearProfile::Abs);
        let e = directional_derivative(
            &h,
            c(0.0, 0.3),
            c(1.0, 0.0),
            &default_schedule(),
            &Default::default(),
        )
        .unwrap();
        assert!(!e.converged);
        assert!((e.one_sided_gap - 2.0).abs() < 1e-9);
    }

    #[test]
    fn asterisks_of_radial_power() {
        let h = BoundaryHomeo::radial_power(2.0).unwrap();
        let dirs = default_directions();
        let opts = DerivativeOptions::default();
        assert!(
            !asterisk_test(&h, c(0.0, 0.0), &dirs, 1e-6, &opts)
                .unwrap()
                .is_asterisk
        );
        let r = asterisk_test(&h, c(1.0, 0.0), &dirs, 1e-6, &opts).unwrap();
        assert!(r.is_asterisk);
        assert!(asterisk_test(&h, c(1.0, 0.0), &[c(0.0, 1.0)], 1e-6, &opts).is_err());
        let aff = BoundaryHomeo::real_affine(
            RealAffine::new([[2.0, 1.0], [0.0, 1.0]], c(1.0, 1.0)).unwrap(),
        );
        assert!(
            asterisk_test(&aff, c(-3.0, 2.0), &dirs, 1e-6, &opts)
                .unwrap()
                .is_asterisk
        );
    }

    #[test]
    fn scans() {
        let opts = DerivativeOptions::default();
        let dirs = default_directions();
        let grid = ScanGrid {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
            spacing: 0.25,
        };
        let r = asterisk_scan(&BoundaryHomeo::identity(), &grid, &dirs, 1e-6, &opts).unwrap();
        assert_eq!(r.iter().filter(|a| a.is_asterisk).count(), 25);

        let grid = ScanGrid {
            x0: -0.5,
            x1: 0.5,
            y0: -0.5,
            y1: 0.5,
            spacing: 0.5,
        };
        let r = asterisk_scan(
            &BoundaryHomeo::radial_power(2.0).unwrap(),
            &grid,
            &dirs,
            1e-6,
            &opts,
        )
        .unwrap();
        assert_eq!(r.len(), 9);
        for a in &r {
            assert_eq!(a.is_asterisk, a.z != c(0.0, 0.0), "{}", a.z);
        }

        let grid = ScanGrid {
            x0: -1.0,
            x1: 1.0,
            y0: -1.0,
            y1: 1.0,
            spacing: 0.5,
        };
        let r = asterisk_scan(
            &BoundaryHomeo::shear(ShearProfile::Abs),
            &grid,
            &dirs,
            1e-6,
            &opts,
        )
        .unwrap();
        for a in &r {
            assert_eq!(a.is_asterisk, a.z.re != 0.0, "{}", a.z);
        }
    }
}
