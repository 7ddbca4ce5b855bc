use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::homeo::BoundaryHomeo;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk<T> {
    pub center: Complex<T>,
    pub radius: T,
}

impl<T: Real> Disk<T> {
    pub fn contains(&self, z: Complex<T>) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskRatio<T> {
    /// Diameter of the inscribed disk.
    pub inner: T,
    /// Diameter of the smallest enclosing disk.
    pub outer: T,
    pub ratio: T,
    pub inner_disk: Disk<T>,
    pub outer_disk: Disk<T>,
    /// Boundary points evaluated, including adaptive refinements.
    pub boundary_points: usize,
}

/// Smallest disk containing all points (iterative Welzl over a fixed pseudo-random order).
pub fn smallest_enclosing_disk<T: Real>(points: &[Complex<T>]) -> Disk<T> {
    let n = points.len();
    if n == 0 {
        return Disk {
            center: Complex::new(T::zero(), T::zero()),
            radius: T::zero(),
        };
    }
    let order = stride_order(n);
    let p = |i: usize| points[order[i]];
    let slack = T::lit(1e-14);
    let outside =
        |d: &Disk<T>, z: Complex<T>| (z - d.center).norm() > d.radius * (T::one() + slack) + slack;
    let mut d = Disk {
        center: p(0),
        radius: T::zero(),
    };
    for i in 1..n {
        if !outside(&d, p(i)) {
            continue;
        }
        d = Disk {
            center: p(i),
            radius: T::zero(),
        };
        for j in 0..i {
            if !outside(&d, p(j)) {
                continue;
            }
            d = diametral(p(i), p(j));
            for k in 0..j {
                if outside(&d, p(k)) {
                    d = circumdisk(p(i), p(j), p(k));
                }
            }
        }
    }
    d
}

fn stride_order(n: usize) -> Vec<usize> {
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut stride = ((n as f64) * 0.618_033_988_75) as usize;
    while stride > 1 && gcd(stride, n) != 1 {
        stride -= 1;
    }
    let stride = stride.max(1);
    (0..n).map(|i| (i * stride) % n).collect()
}

fn diametral<T: Real>(a: Complex<T>, b: Complex<T>) -> Disk<T> {
    let half = T::lit(0.5);
    Disk {
        center: (a + b) * half,
        radius: (a - b).norm() * half,
    }
}

fn circumdisk<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Disk<T> {
    let (ab, ac) = (b - a, c - a);
    let det = T::lit(2.0) * (ab.re * ac.im - ab.im * ac.re);
    let scale = ab.norm_sqr().max(ac.norm_sqr());
    if det.abs() <= T::epsilon() * scale {
        // Collinear: the two farthest points span the disk.
        let pairs = [diametral(a, b), diametral(a, c), diametral(b, c)];
        return pairs
            .into_iter()
            .fold(pairs[0], |m, d| if d.radius > m.radius { d } else { m });
    }
    let (b2, c2) = (ab.norm_sqr(), ac.norm_sqr());
    let ux = (ac.im * b2 - ab.im * c2) / det;
    let uy = (ab.re * c2 - ac.re * b2) / det;
    let off = Complex::new(ux, uy);
    Disk {
        center: a + off,
        radius: off.norm(),
    }
}

fn segment_distance<T: Real>(p: Complex<T>, a: Complex<T>, b: Complex<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let s = (((p - a) * ab.conj()).re / len2)
        .max(T::zero())
        .min(T::one());
    (p - (a + ab * s)).norm()
}

/// Sampled image of a circle: parameters (angles) and image points, cyclically ordered.
struct Boundary<T> {
    angles: Vec<T>,
    images: Vec<Complex<T>>,
}

impl<T: Real> Boundary<T> {
    fn edges(&self) -> impl Iterator<Item = (Complex<T>, Complex<T>)> + '_ {
        let n = self.images.len();
        (0..n).map(move |i| (self.images[i], self.images[(i + 1) % n]))
    }

    /// The arcs whose chords pass within `reach` of `p`, as a polygon of their own. Used only
    /// for clearance near `p`; point containment there is inherited from the full polygon.
    fn near(&self, p: Complex<T>, reach: T) -> Local<T> {
        let edges = self
            .edges()
            .filter(|(a, b)| segment_distance(p, *a, *b) <= reach)
            .collect();
        Local { edges }
    }

    fn clearance(&self, p: Complex<T>) -> T {
        self.edges()
            .fold(T::infinity(), |m, (a, b)| m.min(segment_distance(p, a, b)))
    }

    fn contains(&self, p: Complex<T>) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.im > p.im) != (b.im > p.im) {
                let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if p.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn score(&self, p: Complex<T>) -> T {
        if self.contains(p) {
            self.clearance(p)
        } else {
            T::neg_infinity()
        }
    }
}

struct Local<T> {
    edges: Vec<(Complex<T>, Complex<T>)>,
}

trait Clearance<T> {
    fn score(&self, p: Complex<T>) -> T;
}

impl<T: Real> Clearance<T> for Boundary<T> {
    fn score(&self, p: Complex<T>) -> T {
        Boundary::score(self, p)
    }
}

impl<T: Real> Clearance<T> for Local<T> {
    fn score(&self, p: Complex<T>) -> T {
        self.edges.iter().fold(T::infinity(), |m, (a, b)| {
            m.min(segment_distance(p, *a, *b))
        })
    }
}

/// Compass search for the point of largest clearance, starting at `start`.
fn maximize_clearance<T: Real>(
    b: &impl Clearance<T>,
    start: Complex<T>,
    step: T,
    min_step: T,
) -> (Complex<T>, T) {
    let dirs: Vec<Complex<T>> = (0..8)
        .map(|k| Complex::from_polar(T::one(), T::FRAC_PI_4() * T::from_usize(k).expect("small")))
        .collect();
    let (mut best, mut val) = (start, b.score(start));
    let mut step = step;
    while step > min_step {
        let mut moved = false;
        for d in &dirs {
            let cand = best + *d * step;
            let v = b.score(cand);
            if v > val {
                (best, val) = (cand, v);
                moved = true;
                break;
            }
        }
        if !moved {
            step = step * T::lit(0.5);
        }
    }
    (best, val)
}

/// Inscribed and circumscribed disks of `h(Δ)`, from `resolution` equally spaced samples of
/// `h(∂Δ)`.
///
/// The outer disk is the exact smallest enclosing disk of the samples. The inner disk is
/// centered at the point of largest clearance from the sampled boundary polygon, found by a
/// coarse grid and compass search; boundary arcs near that disk are then subdivided until
/// their chords are within `1e-8` of the outer diameter of the curve, so the polygon's
/// inscribed-chord error does not bias the ratio.
pub fn disk_ratio<T: Real>(
    h: &BoundaryHomeo<T>,
    disk: &Disk<T>,
    resolution: usize,
) -> Result<DiskRatio<T>> {
    if resolution < 8 {
        return Err(Error::Precondition(format!(
            "need at least 8 boundary samples, got {resolution}"
        )));
    }
    if !(disk.radius > T::zero()) {
        return Err(Error::Precondition("disk radius must be positive".into()));
    }
    if let Some(pole) = h.pole() {
        if disk.contains(pole) {
            return Err(Error::Pole(format!(
                "h has a pole at {pole} inside the disk"
            )));
        }
    }
    let eval = |theta: T| {
        let z = disk.center + Complex::from_polar(disk.radius, theta);
        h.eval(z).ok_or_else(|| Error::Pole(format!("h({z}) = ∞")))
    };
    let nn = T::from_usize(resolution).expect("fits");
    let angles: Vec<T> = (0..resolution)
        .map(|j| T::TAU() * T::from_usize(j).expect("fits") / nn)
        .collect();
    let images = angles
        .iter()
        .map(|&a| eval(a))
        .collect::<Result<Vec<_>>>()?;
    let outer_disk = smallest_enclosing_disk(&images);
    let diam = outer_disk.radius * T::lit(2.0);
    let mut boundary = Boundary { angles, images };

    // Coarse start: best interior point on a 21 × 21 grid over the bounding box.
    const GRID: usize = 21;
    let (lo, hi) = boundary.images.iter().fold(
        (
            Complex::new(T::infinity(), T::infinity()),
            Complex::new(T::neg_infinity(), T::neg_infinity()),
        ),
        |(lo, hi), w| {
            (
                Complex::new(lo.re.min(w.re), lo.im.min(w.im)),
                Complex::new(hi.re.max(w.re), hi.im.max(w.im)),
            )
        },
    );
    let g = T::from_usize(GRID - 1).expect("small");
    let mut start = outer_disk.center;
    let mut start_val = boundary.score(start);
    for i in 0..GRID {
        for j in 0..GRID {
            let (fi, fj) = (
                T::from_usize(i).expect("small") / g,
                T::from_usize(j).expect("small") / g,
            );
            let p = Complex::new(lo.re + (hi.re - lo.re) * fi, lo.im + (hi.im - lo.im) * fj);
            let v = boundary.score(p);
            if v > start_val {
                (start, start_val) = (p, v);
            }
        }
    }
    if !start_val.is_finite() {
        return Err(Error::DegenerateSamples(
            "image of the disk has empty interior".into(),
        ));
    }
    let min_step = diam * T::lit(1e-12);
    let sag_tol = diam * T::lit(1e-8);
    let (mut center, mut clear) = maximize_clearance(
        &boundary,
        start,
        (hi.re - lo.re).max(hi.im - lo.im) / g,
        min_step,
    );
    for _ in 0..16 {
        let reach = clear * T::lit(1.01) + sag_tol;
        let n = boundary.images.len();
        let mut angles = Vec::with_capacity(n);
        let mut images = Vec::with_capacity(n);
        let mut changed = false;
        for i in 0..n {
            let (a, b) = (boundary.images[i], boundary.images[(i + 1) % n]);
            angles.push(boundary.angles[i]);
            images.push(a);
            if segment_distance(center, a, b) > reach {
                continue;
            }
            let t0 = boundary.angles[i];
            let t1 = if i + 1 == n {
                T::TAU()
            } else {
                boundary.angles[i + 1]
            };
            let mid = (t0 + t1) * T::lit(0.5);
            let w = eval(mid)?;
            if segment_distance(w, a, b) > sag_tol {
                angles.push(mid);
                images.push(w);
                changed = true;
            }
        }
        boundary = Boundary { angles, images };
        // Refinement moves the optimum by about a sagitta, so a local search over the nearby
        // arcs suffices.
        let step = diam * T::lit(1e-4);
        let near = boundary.near(center, clear + diam * T::lit(1e-3));
        center = maximize_clearance(&near, center, step, min_step).0;
        clear = boundary.score(center);
        if !changed {
            break;
        }
    }
    let inner = clear * T::lit(2.0);
    Ok(DiskRatio {
        inner,
        outer: diam,
        ratio: diam / inner,
        inner_disk: Disk {
            center,
            radius: clear,
        },
        outer_disk,
        boundary_points: boundary.images.len(),
    })
}
