//! Stiffness of the strip-area function of a planar homeomorphism, and absolute continuity of
//! its projections along horizontal lines.

use serde::Serialize;

use super::ac::{
    ac_modulus, level_jumps, stretch_classify, IntervalFunction, ModulusRow, StretchReport,
};
use super::dyadic::{inner_disk_measure, DyadicSet};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::zoom::BoundaryHomeo;
use crate::Complex;

/// `A(J) = α(h([0,1] × J))`, evaluated by rasterizing the image strip into a square window
/// around `h([0,1]²)` and packing disks into the raster.
///
/// A window cell belongs to the raster when the preimages of its four corners and its center
/// all lie in `[0,1] × J`.
pub struct StripMeasure<T> {
    origin: Complex<T>,
    side: T,
    level: u32,
    vertices: Vec<Option<Complex<T>>>,
    centers: Vec<Option<Complex<T>>>,
}

impl<T: Real> StripMeasure<T> {
    /// `level ≤ 15` fixes the raster grid `2^level × 2^level`.
    pub fn new(h: &BoundaryHomeo<T>, level: u32) -> Result<Self> {
        if !(1..=15).contains(&level) {
            return Err(Error::Precondition(format!(
                "raster level {level} outside 1..=15"
            )));
        }
        check_pole_free(h)?;
        const SAMPLES: usize = 64;
        let s = T::from_usize(SAMPLES).expect("fits");
        let mut lo = Complex::new(T::infinity(), T::infinity());
        let mut hi = Complex::new(T::neg_infinity(), T::neg_infinity());
        for i in 0..=SAMPLES {
            for j in 0..=SAMPLES {
                let z = Complex::new(
                    T::from_usize(i).expect("fits") / s,
                    T::from_usize(j).expect("fits") / s,
                );
                let w = h
                    .eval(z)
                    .ok_or_else(|| Error::Pole(format!("h({z}) = ∞")))?;
                lo = Complex::new(lo.re.min(w.re), lo.im.min(w.im));
                hi = Complex::new(hi.re.max(w.re), hi.im.max(w.im));
            }
        }
        let side = (hi.re - lo.re).max(hi.im - lo.im);
        let inv = h.inverse();
        let n = 1usize << level;
        let nt = T::from_usize(n).expect("fits");
        let half = T::lit(0.5);
        let at = |x: T, y: T| inv.eval(Complex::new(lo.re + side * x / nt, lo.im + side * y / nt));
        let vertices = (0..=n)
            .flat_map(|i| (0..=n).map(move |j| (i, j)))
            .map(|(i, j)| {
                at(
                    T::from_usize(i).expect("fits"),
                    T::from_usize(j).expect("fits"),
                )
            })
            .collect();
        let centers = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                at(
                    T::from_usize(i).expect("fits") + half,
                    T::from_usize(j).expect("fits") + half,
                )
            })
            .collect();
        Ok(Self {
            origin: lo,
            side,
            level,
            vertices,
            centers,
        })
    }

    /// Lower-left corner and side of the window.
    pub fn window(&self) -> (Complex<T>, T) {
        (self.origin, self.side)
    }

    /// The rasterized image of `[0,1] × [a, b]`, in window coordinates.
    pub fn raster(&self, a: T, b: T) -> DyadicSet {
        let n = 1usize << self.level;
        let inside = |p: &Option<Complex<T>>| match p {
            Some(p) => p.re >= T::zero() && p.re <= T::one() && p.im >= a && p.im <= b,
            None => false,
        };
        let cells = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                inside(&self.centers[i * n + j])
                    && [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
                        .iter()
                        .all(|&(u, v)| inside(&self.vertices[u * (n + 1) + v]))
            });
        DyadicSet::new(
            2,
            self.level,
            cells.map(|(i, j)| [i as u32, j as u32]).collect::<Vec<_>>(),
        )
        .expect("cells lie on the grid")
    }
}

impl<T: Real> IntervalFunction<T> for StripMeasure<T> {
    fn eval(&self, a: T, b: T) -> T {
        let packing = inner_disk_measure(&self.raster(a, b), self.level + 1)
            .expect("planar set at supported level");
        T::lit(packing.area) * self.side * self.side
    }
}

fn check_pole_free<T: Real>(h: &BoundaryHomeo<T>) -> Result<()> {
    match h.pole() {
        Some(p)
            if p.re >= T::zero() && p.re <= T::one() && p.im >= T::zero() && p.im <= T::one() =>
        {
            Err(Error::Pole(format!("h has a pole at {p} inside [0,1]²")))
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffLineOptions {
    /// Raster level for the strip measure.
    pub raster_level: u32,
    /// Largest `N` tried by the stretch classification.
    pub n_max: u32,
    /// Finest dyadic level searched by the modulus, also used for the slope bound.
    pub modulus_level: u32,
}

impl Default for StiffLineOptions {
    fn default() -> Self {
        Self {
            raster_level: 9,
            n_max: 4,
            modulus_level: 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StiffLineReport<T> {
    pub y: T,
    pub stretch: StretchReport<T>,
    pub modulus: Vec<ModulusRow<T>>,
    /// Largest `|Δg| / Δx` over the finest modulus cells, `g = π ∘ h` on the line.
    pub sup_slope: T,
    /// Every modulus row within `(1 + 0.05) · sup_slope · δ`.
    pub consistent: bool,
}

impl<T> StiffLineReport<T> {
    pub fn pass(&self) -> bool {
        self.stretch.stiff() && self.consistent
    }
}

/// Stretch classification of `A(J) = α(h([0,1] × J))` at `y` together with the modulus of
/// absolute continuity of `x ↦ π(h(x + iy))`, where `π(w) = Re(w · conj(u))`.
pub fn stiff_line_ac_check<T: Real>(
    h: &BoundaryHomeo<T>,
    y: T,
    projection: Complex<T>,
    scales: &[u32],
    deltas: &[u32],
    options: StiffLineOptions,
) -> Result<StiffLineReport<T>> {
    if (projection.norm() - T::one()).abs() > T::lit(1e-9) {
        return Err(Error::Precondition(format!(
            "projection covector {projection} is not a unit vector"
        )));
    }
    let strip = StripMeasure::new(h, options.raster_level)?;
    let stretch = stretch_classify(&strip, y, options.n_max, scales)?;
    let g = |x: T| {
        let w = h
            .eval(Complex::new(x, y))
            .unwrap_or(Complex::new(T::nan(), T::nan()));
        w.re * projection.re + w.im * projection.im
    };
    let modulus = ac_modulus(&g, deltas, options.modulus_level)?;
    let width = T::lit((options.modulus_level as f64).exp2());
    let sup_slope = level_jumps(&g, options.modulus_level)
        .into_iter()
        .fold(T::zero(), |m, d| m.max(d * width));
    let slack = T::lit(1.05);
    let consistent = modulus
        .iter()
        .all(|row| row.sup <= slack * sup_slope * T::lit((-(row.k as f64)).exp2()));
    Ok(StiffLineReport {
        y,
        stretch,
        modulus,
        sup_slope,
        consistent,
    })
}
