use std::collections::BTreeSet;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rationals used for every measure in this module. All sets live at dyadic levels of at
/// most [`MAX_LEVEL`], so denominators stay far below `2^127`.
pub type Rational = Ratio<i128>;

/// Largest supported level.
pub const MAX_LEVEL: u32 = 30;

/// `2^{-k}` exactly.
pub fn dyadic(k: u32) -> Rational {
    Rational::new(1, 1i128 << k)
}

/// A finite union of closed dyadic cubes of side `2^{-level}` in `[0, 1]^dim`.
///
/// In one dimension the second index of every cell is 0. Cell `[i, j]` of a planar set is
/// `[i, i+1] × [j, j+1]` scaled by `2^{-level}`, so `j` indexes rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DyadicLiteral")]
pub struct DyadicSet {
    dim: u8,
    level: u32,
    cells: BTreeSet<[u32; 2]>,
}

/// The configuration form `{d, L, cells: [[i], …]}` or `{d, L, cells: [[i, j], …]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicLiteral {
    pub d: u8,
    #[serde(rename = "L")]
    pub level: u32,
    pub cells: Vec<Vec<u32>>,
}

impl TryFrom<DyadicLiteral> for DyadicSet {
    type Error = Error;

    fn try_from(lit: DyadicLiteral) -> Result<Self> {
        let cells = lit
            .cells
            .iter()
            .map(|c| match (lit.d, c.as_slice()) {
                (1, [i]) => Ok([*i, 0]),
                (2, [i, j]) => Ok([*i, *j]),
                _ => Err(Error::InvalidSet(format!(
                    "cell {c:?} does not have {} coordinates",
                    lit.d
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        DyadicSet::new(lit.d, lit.level, cells)
    }
}

impl DyadicSet {
    pub fn new(dim: u8, level: u32, cells: impl IntoIterator<Item = [u32; 2]>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidSet(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if level > MAX_LEVEL {
            return Err(Error::InvalidSet(format!(
                "level {level} exceeds {MAX_LEVEL}"
            )));
        }
        let side = 1u64 << level;
        let cells: BTreeSet<[u32; 2]> = cells.into_iter().collect();
        for c in &cells {
            let bad_y = if dim == 1 {
                c[1] != 0
            } else {
                c[1] as u64 >= side
            };
            if c[0] as u64 >= side || bad_y {
                return Err(Error::InvalidSet(format!(
                    "cell {c:?} outside level {level} grid"
                )));
            }
        }
        Ok(Self { dim, level, cells })
    }

    pub fn empty(dim: u8, level: u32) -> Result<Self> {
        Self::new(dim, level, [])
    }

    pub fn full(dim: u8, level: u32) -> Result<Self> {
        let side = 1u32 << level;
        let rows = if dim == 2 { side } else { 1 };
        Self::new(
            dim,
            level,
            (0..rows).flat_map(|j| (0..side).map(move |i| [i, j])),
        )
    }

    /// The union of the level-`level` cells of `[0, 1]` meeting `[a, b]` in more than a point.
    pub fn interval(level: u32, a: Rational, b: Rational) -> Result<Self> {
        let side = 1i128 << level;
        let lo = (a * side).floor().to_integer().max(0);
        let hi = (b * side).ceil().to_integer().min(side);
        Self::new(1, level, (lo..hi).map(|i| [i as u32, 0]))
    }

    /// Keep the outer quarters of every interval, `generations` times, starting from `[0, 1]`.
    /// Needs `level ≥ 2·generations`.
    pub fn gap_cantor(generations: u32, level: u32) -> Result<Self> {
        if level < 2 * generations {
            return Err(Error::InvalidSet(format!(
                "level {level} cannot resolve {generations} generations"
            )));
        }
        let mut starts = vec![0u64];
        for g in 0..generations {
            let quarter = 1u64 << (level - 2 * (g + 1));
            starts = starts.iter().flat_map(|&s| [s, s + 3 * quarter]).collect();
        }
        let width = 1u64 << (level - 2 * generations);
        Self::new(
            1,
            level,
            starts
                .iter()
                .flat_map(|&s| (s..s + width).map(|i| [i as u32, 0])),
        )
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn cells(&self) -> &BTreeSet<[u32; 2]> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains_cell(&self, cell: [u32; 2]) -> bool {
        self.cells.contains(&cell)
    }

    /// Side length `2^{-level}`.
    pub fn side(&self) -> Rational {
        dyadic(self.level)
    }

    /// The same set described at a finer level.
    pub fn refine(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::InvalidSet(format!(
                "cannot refine level {} to coarser {level}",
                self.level
            )));
        }
        let f = 1u32 << (level - self.level);
        let ys = if self.dim == 2 { f } else { 1 };
        let cells = self
            .cells
            .iter()
            .flat_map(|&[i, j]| {
                (0..ys).flat_map(move |b| (0..f).map(move |a| [i * f + a, j * ys + b]))
            })
            .collect::<Vec<_>>();
        Self::new(self.dim, level, cells)
    }

    fn common(&self, other: &Self) -> Result<(Self, Self)> {
        if self.dim != other.dim {
            return Err(Error::InvalidSet("dimension mismatch".into()));
        }
        let level = self.level.max(other.level);
        Ok((self.refine(level)?, other.refine(level)?))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.common(other)?;
        Self::new(a.dim, a.level, a.cells.union(&b.cells).copied())
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.common(other)?;
        Self::new(a.dim, a.level, a.cells.intersection(&b.cells).copied())
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.common(other)?;
        Self::new(a.dim, a.level, a.cells.difference(&b.cells).copied())
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        let (a, b) = self.common(other)?;
        Ok(a.cells.is_subset(&b.cells))
    }

    /// For a one-dimensional set: the cell `[i·2^{-L}, (i+1)·2^{-L}]`.
    pub fn cell_interval(&self, i: u32) -> (Rational, Rational) {
        let s = self.side();
        (s * i as i128, s * (i as i128 + 1))
    }

    /// For a one-dimensional set: the maximal runs of adjacent cells, as closed intervals.
    pub fn components(&self) -> Vec<(Rational, Rational)> {
        let mut out: Vec<(Rational, Rational)> = Vec::new();
        let mut run: Option<(u32, u32)> = None;
        for &[i, _] in &self.cells {
            run = match run {
                Some((a, b)) if b == i => Some((a, i + 1)),
                Some((a, b)) => {
                    out.push((self.side() * a as i128, self.side() * b as i128));
                    Some((i, i + 1))
                }
                None => Some((i, i + 1)),
            };
        }
        if let Some((a, b)) = run {
            out.push((self.side() * a as i128, self.side() * b as i128));
        }
        out
    }

    /// Exact measure of `self ∩ [a, b]` for a one-dimensional set.
    pub fn measure_in(&self, a: Rational, b: Rational) -> Rational {
        self.components()
            .iter()
            .fold(Rational::zero(), |acc, &(lo, hi)| {
                acc + overlap((lo, hi), (a, b))
            })
    }
}

/// Length of the intersection of two closed intervals.
pub fn overlap(x: (Rational, Rational), y: (Rational, Rational)) -> Rational {
    let lo = x.0.max(y.0);
    let hi = x.1.min(y.1);
    if hi > lo {
        hi - lo
    } else {
        Rational::zero()
    }
}

/// `|cells| · 2^{-d·L}`, the outer measure of a finite-level carpet.
pub fn outer_measure(s: &DyadicSet) -> Rational {
    Rational::new(s.cells.len() as i128, 1i128 << (s.dim as u32 * s.level))
}

/// Result of the disk packing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskPacking {
    /// `Σ π r²`, a lower bound for the inner disk measure.
    pub area: f64,
    /// `(center x, center y, radius)` of each disk, largest first.
    pub disks: Vec<(f64, f64, f64)>,
}

/// Greedy packing of disjoint disks inside a planar set, largest first.
///
/// Candidates are the inscribed disks of the dyadic squares of side `1` down to
/// `2^{1-resolution}` (so centers lie on the `2^{-resolution}` grid and radii are dyadic). A
/// candidate is taken when its square lies in `S` and its disk avoids every disk already taken.
/// Disks of disjoint squares never meet, so only ancestors can block a candidate. This makes
/// the packed area a sum over the maximal dyadic squares of `S` of a per-square value that
/// only grows with the square's depth, so the result is monotone in `S`.
pub fn inner_disk_measure(s: &DyadicSet, resolution: u32) -> Result<DiskPacking> {
    if s.dim != 2 {
        return Err(Error::InvalidSet(
            "inner disk measure needs a planar set".into(),
        ));
    }
    if resolution > 16 {
        return Err(Error::Precondition(format!(
            "resolution {resolution} too fine"
        )));
    }
    let mut disks = Vec::new();
    let mut stack: Vec<(f64, f64, f64)> = Vec::new();
    pack(s, 0, 0, 0, resolution, &mut stack, &mut disks);
    disks.sort_by(|a, b| {
        b.2.total_cmp(&a.2)
            .then(a.0.total_cmp(&b.0))
            .then(a.1.total_cmp(&b.1))
    });
    let area = disks.iter().map(|d| std::f64::consts::PI * d.2 * d.2).sum();
    Ok(DiskPacking { area, disks })
}

/// How much of the square `(i, j)` at `level` lies in `s`: none, part, or all of it.
#[derive(PartialEq)]
enum Cover {
    None,
    Part,
    All,
}

fn coverage(s: &DyadicSet, i: u32, j: u32, level: u32) -> Cover {
    if level >= s.level {
        let shift = level - s.level;
        return if s.cells.contains(&[i >> shift, j >> shift]) {
            Cover::All
        } else {
            Cover::None
        };
    }
    let f = 1u32 << (s.level - level);
    let (x0, y0) = (i * f, j * f);
    let count = s
        .cells
        .range([x0, 0]..[x0 + f, 0])
        .filter(|c| (y0..y0 + f).contains(&c[1]))
        .count() as u64;
    match count {
        0 => Cover::None,
        c if c == (f as u64) * (f as u64) => Cover::All,
        _ => Cover::Part,
    }
}

fn pack(
    s: &DyadicSet,
    i: u32,
    j: u32,
    level: u32,
    resolution: u32,
    stack: &mut Vec<(f64, f64, f64)>,
    out: &mut Vec<(f64, f64, f64)>,
) {
    if level >= resolution {
        return;
    }
    let cov = coverage(s, i, j, level);
    if cov == Cover::None {
        return;
    }
    let side = (-(level as f64)).exp2();
    let disk = ((i as f64 + 0.5) * side, (j as f64 + 0.5) * side, side / 2.0);
    let take = cov == Cover::All
        && stack.iter().all(|&(x, y, r)| {
            let (dx, dy) = (x - disk.0, y - disk.1);
            dx * dx + dy * dy >= (r + disk.2) * (r + disk.2)
        });
    if take {
        out.push(disk);
        stack.push(disk);
    }
    for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        pack(s, 2 * i + a, 2 * j + b, level + 1, resolution, stack, out);
    }
    if take {
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn measures() {
        let q = DyadicSet::new(2, 1, [[0, 0]]).unwrap();
        assert_eq!(outer_measure(&q), Rational::new(1, 4));
        assert_eq!(
            outer_measure(&DyadicSet::full(2, 5).unwrap()),
            Rational::one()
        );
        assert_eq!(
            outer_measure(&DyadicSet::full(1, 7).unwrap()),
            Rational::one()
        );
        let c = DyadicSet::gap_cantor(4, 8).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!(outer_measure(&c), Rational::new(1, 16));
    }

    #[test]
    fn rejects_bad_cells() {
        assert!(DyadicSet::new(2, 1, [[2, 0]]).is_err());
        assert!(DyadicSet::new(1, 3, [[1, 1]]).is_err());
        assert!(DyadicSet::new(3, 1, []).is_err());
    }

    #[test]
    fn refinement_preserves_measure() {
        let s = DyadicSet::new(2, 2, [[0, 0], [3, 1], [2, 2]]).unwrap();
        let r = s.refine(5).unwrap();
        assert_eq!(outer_measure(&s), outer_measure(&r));
        assert!(s.is_subset(&r).unwrap() && r.is_subset(&s).unwrap());
    }

    #[test]
    fn components_and_partial_measure() {
        let s = DyadicSet::new(1, 3, [[0, 0], [1, 0], [5, 0]]).unwrap();
        assert_eq!(
            s.components(),
            vec![
                (Rational::zero(), Rational::new(1, 4)),
                (Rational::new(5, 8), Rational::new(3, 4))
            ]
        );
        assert_eq!(
            s.measure_in(Rational::new(1, 8), Rational::new(11, 16)),
            Rational::new(3, 16)
        );
    }

    #[test]
    fn literal_parsing() {
        let lit = DyadicLiteral {
            d: 2,
            level: 1,
            cells: vec![vec![0, 1]],
        };
        assert_eq!(DyadicSet::try_from(lit).unwrap().len(), 1);
        let bad = DyadicLiteral {
            d: 2,
            level: 1,
            cells: vec![vec![0]],
        };
        assert!(DyadicSet::try_from(bad).is_err());
    }

    #[test]
    fn packings() {
        assert_eq!(
            inner_disk_measure(&DyadicSet::empty(2, 3).unwrap(), 6)
                .unwrap()
                .area,
            0.0
        );
        let unit = inner_disk_measure(&DyadicSet::full(2, 0).unwrap(), 8).unwrap();
        assert_eq!(unit.disks[0], (0.5, 0.5, 0.5));
        assert!(unit.area >= std::f64::consts::FRAC_PI_4 && unit.area <= 1.0);
        let w = 1.0 / 16.0;
        let strip = DyadicSet::new(2, 4, (0..16).map(|i| [i, 0])).unwrap();
        let p = inner_disk_measure(&strip, 8).unwrap();
        assert!(p.area >= 0.7 * w && p.area <= w, "{}", p.area);
    }
}
