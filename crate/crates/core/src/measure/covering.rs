use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::{dyadic, outer_measure, overlap, DyadicSet, Rational};
use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with exact endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if hi < lo {
            return Err(Error::Precondition(format!(
                "interval [{lo}, {hi}] is reversed"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn centered(center: Rational, half: Rational) -> Result<Self> {
        Self::new(center - half, center + half)
    }

    pub fn len(&self) -> Rational {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn center(&self) -> Rational {
        (self.lo + self.hi) / 2
    }

    /// The concentric interval of three times the length.
    pub fn tripled(&self) -> Self {
        let l = self.len();
        Self {
            lo: self.lo - l,
            hi: self.hi + l,
        }
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Interiors meet.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo.max(other.lo) < self.hi.min(other.hi)
    }
}

/// Intervals of `[0, 1]` with pairwise disjoint interiors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialPartition {
    intervals: Vec<Interval>,
}

impl PartialPartition {
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self> {
        intervals.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        if intervals
            .iter()
            .any(|i| i.lo < Rational::zero() || i.hi > Rational::one())
        {
            return Err(Error::InvalidFamily("interval outside [0, 1]".into()));
        }
        if intervals.windows(2).any(|w| w[0].hi > w[1].lo) {
            return Err(Error::InvalidFamily("interiors overlap".into()));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// `|I| = Σ |I_k|`.
    pub fn total_length(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |a, i| a + i.len())
    }
}

/// Candidate intervals for the Besicovich selection, together with the set they must cover.
///
/// The finite form of "every point of `S` is the center of some interval" is: every cell of
/// `target` lies inside some member centered at the cell's midpoint, and every member is
/// centered at a cell midpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalFamily {
    pub intervals: Vec<Interval>,
    pub target: DyadicSet,
}

impl IntervalFamily {
    pub fn validate(&self) -> Result<()> {
        let s = &self.target;
        if s.dim() != 1 {
            return Err(Error::InvalidFamily(
                "target must be one-dimensional".into(),
            ));
        }
        let mid = |i: u32| {
            let (a, b) = s.cell_interval(i);
            (a + b) / 2
        };
        let side = s.side();
        for iv in &self.intervals {
            let c = iv.center();
            let idx = (c / side).floor().to_integer();
            let ok = idx >= 0 && s.contains_cell([idx as u32, 0]) && mid(idx as u32) == c;
            if !ok {
                return Err(Error::InvalidFamily(format!(
                    "interval [{}, {}] is not centered at a cell midpoint of the target",
                    iv.lo, iv.hi
                )));
            }
        }
        for &[i, _] in s.cells() {
            let (a, b) = s.cell_interval(i);
            let cell = Interval { lo: a, hi: b };
            if !self
                .intervals
                .iter()
                .any(|iv| iv.center() == mid(i) && iv.contains(&cell))
            {
                return Err(Error::InvalidFamily(format!(
                    "cell [{a}, {b}] has no interval centered on it"
                )));
            }
        }
        Ok(())
    }
}

/// Greedy largest-first selection of intervals with disjoint interiors; ties go to the
/// smallest left endpoint. Returns indices into `intervals`, in selection order.
pub fn greedy_disjoint(intervals: &[Interval]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&intervals[a], &intervals[b]);
        y.len().cmp(&x.len()).then(x.lo.cmp(&y.lo)).then(a.cmp(&b))
    });
    let mut chosen: BTreeMap<Rational, (Rational, usize)> = BTreeMap::new();
    let mut picked = Vec::new();
    for idx in order {
        let iv = intervals[idx];
        if !fits(&chosen, &iv) {
            continue;
        }
        chosen.insert(iv.lo, (iv.hi, idx));
        picked.push(idx);
    }
    picked
}

/// Whether `iv` has interior disjoint from every chosen interval (keyed by left endpoint).
fn fits(chosen: &BTreeMap<Rational, (Rational, usize)>, iv: &Interval) -> bool {
    if let Some((_, &(hi, _))) = chosen.range(..=iv.lo).next_back() {
        if hi > iv.lo {
            return false;
        }
    }
    // Any chosen interval starting inside (lo, hi) overlaps; one starting at lo overlaps unless
    // both are degenerate.
    match chosen.range(iv.lo..).next() {
        Some((&lo, &(hi, _))) => !(lo < iv.hi || (lo == iv.lo && hi > lo && iv.hi > iv.lo)),
        None => true,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesicovichReport {
    pub selected: Vec<Interval>,
    pub total_length: Rational,
    pub target_measure: Rational,
    pub disjoint: bool,
    pub members: bool,
    /// `Σ |I_j| ≥ μ(S) / 3`.
    pub third_bound: bool,
    /// `⋃ 3 I_j ⊇ S`.
    pub tripled_cover: bool,
}

impl BesicovichReport {
    pub fn pass(&self) -> bool {
        self.disjoint && self.members && self.third_bound && self.tripled_cover
    }
}

/// Greedy selection from a valid Besicovich family, with every postcondition checked exactly.
pub fn besicovich_select(family: &IntervalFamily) -> Result<BesicovichReport> {
    family.validate()?;
    let picked = greedy_disjoint(&family.intervals);
    let selected: Vec<Interval> = picked.iter().map(|&i| family.intervals[i]).collect();
    let total_length = selected.iter().fold(Rational::zero(), |a, i| a + i.len());
    let target_measure = outer_measure(&family.target);
    let mut sorted = selected.clone();
    sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
    let disjoint = sorted.windows(2).all(|w| !w[0].overlaps(&w[1]));
    let members = selected.iter().all(|s| family.intervals.contains(s));
    let tripled: Vec<Interval> = selected.iter().map(Interval::tripled).collect();
    let tripled_cover = family
        .target
        .components()
        .iter()
        .all(|&(a, b)| covered(&tripled, a, b));
    Ok(BesicovichReport {
        third_bound: total_length * 3 >= target_measure,
        selected,
        total_length,
        target_measure,
        disjoint,
        members,
        tripled_cover,
    })
}

/// Whether the union of `cover` contains `[a, b]`.
pub fn covered(cover: &[Interval], a: Rational, b: Rational) -> bool {
    let mut sorted: Vec<&Interval> = cover.iter().collect();
    sorted.sort_by(|x, y| x.lo.cmp(&y.lo));
    let mut reach = a;
    let mut started = false;
    for iv in sorted {
        if iv.lo > reach {
            break;
        }
        if iv.hi >= reach {
            started = true;
            reach = iv.hi;
        }
        if started && reach >= b {
            return true;
        }
    }
    false
}

/// Closed pieces of `[a, b]` not covered by the interiors of the chosen intervals, in order.
fn uncovered(
    chosen: &BTreeMap<Rational, (Rational, usize)>,
    a: Rational,
    b: Rational,
) -> Vec<(Rational, Rational)> {
    let mut pieces = Vec::new();
    let mut cur = a;
    let start = chosen.range(..a).next_back().map_or(a, |(&lo, _)| lo);
    for (&lo, &(hi, _)) in chosen.range(start..b) {
        if hi <= cur {
            continue;
        }
        if lo >= cur {
            pieces.push((cur, lo));
        }
        cur = hi;
    }
    if cur <= b {
        pieces.push((cur, b));
    }
    pieces
}

/// Exact `μ(S Δ T)` for a one-dimensional carpet `S` and intervals `T` with disjoint interiors.
pub fn symmetric_difference(s: &DyadicSet, t: &[Interval]) -> Rational {
    let mu_t = t.iter().fold(Rational::zero(), |a, i| a + i.len());
    let comps = s.components();
    let inter = t
        .iter()
        .flat_map(|iv| {
            let first = comps.partition_point(|c| c.1 <= iv.lo);
            comps[first..]
                .iter()
                .take_while(move |c| c.0 < iv.hi)
                .map(move |&c| overlap(c, (iv.lo, iv.hi)))
        })
        .fold(Rational::zero(), |a, x| a + x);
    outer_measure(s) + mu_t - inter * 2
}

/// A family given by a generator: at a dyadic point `p` and scale `k` it offers an interval
/// with `p` as an endpoint and length in `(2^{-k-1}, 2^{-k}]`.
pub trait RenewableFamily: Sync {
    fn interval(&self, point: Rational, k: u32) -> Option<Interval>;
}

/// Dyadic intervals of length exactly `2^{-k}` starting or ending at the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DyadicIntervals {
    /// `[p, p + 2^{-k}]`.
    Right,
    /// `[p − 2^{-k}, p]`.
    Left,
    /// `Right` at even multiples of `2^{-k}`, `Left` at odd ones.
    Alternate,
}

impl RenewableFamily for DyadicIntervals {
    fn interval(&self, p: Rational, k: u32) -> Option<Interval> {
        let l = dyadic(k);
        let right = match self {
            DyadicIntervals::Right => true,
            DyadicIntervals::Left => false,
            DyadicIntervals::Alternate => (p / l).to_integer() % 2 == 0,
        };
        Some(if right {
            Interval { lo: p, hi: p + l }
        } else {
            Interval { lo: p - l, hi: p }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VitaliReport {
    pub intervals: Vec<Interval>,
    pub symdiff: Rational,
    pub epsilon: Rational,
    /// The clearance scale `λ = 2^{-m}`: no selected interval is longer.
    pub scale: u32,
    /// Finest scale examined.
    pub finest: u32,
    pub pass: bool,
}

/// Selects disjoint members of a renewable family whose union approximates `S` to within `ε`.
///
/// With `c` components, the clearance scale `λ = 2^{-m}` is chosen so that `4cλ ≤ ε`: any
/// interval with an endpoint in `S` and length below `λ` then stays within `λ` of `S`. Scales
/// `k = m, m+1, …` are processed in turn (this is length-greedy, as lengths at scale `k` lie in
/// `(2^{-k-1}, 2^{-k}]`); at each scale the candidates are the family's intervals at the
/// level-`k` grid points of `S`, taken leftmost first when they avoid earlier picks. Stops once
/// `μ(S Δ T) < ε` or after `max_extra` scales past `m`.
pub fn vitali_select(
    s: &DyadicSet,
    family: &impl RenewableFamily,
    epsilon: Rational,
    max_extra: u32,
) -> Result<VitaliReport> {
    if epsilon <= Rational::zero() {
        return Err(Error::Precondition("ε must be positive".into()));
    }
    if s.dim() != 1 {
        return Err(Error::InvalidSet(
            "Vitali selection needs a one-dimensional set".into(),
        ));
    }
    let comps = s.components();
    let mut m = s.level();
    while dyadic(m) * (4 * comps.len().max(1) as i128) > epsilon {
        m += 1;
    }
    let mut chosen: BTreeMap<Rational, (Rational, usize)> = BTreeMap::new();
    let mut picked: Vec<Interval> = Vec::new();
    let mut symdiff = symmetric_difference(s, &picked);
    let mut finest = m;
    let limit = (m + max_extra).min(super::dyadic::MAX_LEVEL + 30);
    for k in m..=limit {
        if symdiff < epsilon {
            break;
        }
        finest = k;
        let lo_len = dyadic(k + 1);
        let hi_len = dyadic(k);
        for &(a, b) in &comps {
            // A grid point strictly inside an earlier pick offers no disjoint interval, so only
            // the closed uncovered pieces of the component are walked.
            let pieces = uncovered(&chosen, a, b);
            for (u, v) in pieces {
                let first = ((u - a) / hi_len).ceil().to_integer();
                let last = ((v - a) / hi_len).floor().to_integer();
                for n in first..=last {
                    let p = a + hi_len * n;
                    let Some(iv) = family.interval(p, k) else {
                        continue;
                    };
                    if !(iv.lo == p || iv.hi == p) || iv.len() <= lo_len || iv.len() > hi_len {
                        return Err(Error::InvalidFamily(format!(
                            "interval [{}, {}] offered at ({p}, {k})",
                            iv.lo, iv.hi
                        )));
                    }
                    if fits(&chosen, &iv) {
                        chosen.insert(iv.lo, (iv.hi, picked.len()));
                        picked.push(iv);
                    }
                }
            }
        }
        symdiff = symmetric_difference(s, &picked);
    }
    picked.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(VitaliReport {
        pass: symdiff < epsilon,
        intervals: picked,
        symdiff,
        epsilon,
        scale: m,
        finest,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PorosityVerdict {
    pub point: Rational,
    /// Density `μ(J ∩ S) / |J|` at each requested scale.
    pub densities: Vec<Rational>,
    pub porous: bool,
}

/// For each cell midpoint `x` of `S` and each scale `k`, the centered interval
/// `J = [x − 2^{-k-1}, x + 2^{-k-1}] ∩ [0, 1]`; `x` is δ-porous when `μ(J ∩ S) < (1−δ)|J|` at
/// every scale.
pub fn porosity_check(
    s: &DyadicSet,
    delta: Rational,
    scales: &[u32],
) -> Result<Vec<PorosityVerdict>> {
    if s.dim() != 1 {
        return Err(Error::InvalidSet(
            "porosity needs a one-dimensional set".into(),
        ));
    }
    if delta <= Rational::zero() || delta >= Rational::one() {
        return Err(Error::Precondition("δ must lie in (0, 1)".into()));
    }
    let keep = Rational::one() - delta;
    Ok(s.cells()
        .iter()
        .map(|&[i, _]| {
            let (a, b) = s.cell_interval(i);
            let x = (a + b) / 2;
            let densities: Vec<Rational> = scales
                .iter()
                .map(|&k| {
                    let h = dyadic(k + 1);
                    let (lo, hi) = ((x - h).max(Rational::zero()), (x + h).min(Rational::one()));
                    s.measure_in(lo, hi) / (hi - lo)
                })
                .collect();
            let porous = densities.iter().all(|d| *d < keep);
            PorosityVerdict {
                point: x,
                densities,
                porous,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FubiniReport {
    pub mu_s: Rational,
    /// Rows whose horizontal slice has measure greater than `t`.
    pub f_t: DyadicSet,
    pub mu_f: Rational,
    /// `μ(S) < t²`.
    pub hypothesis: bool,
    /// The implication `μ(S) < t² ⇒ μ(F_t) ≤ t`.
    pub pass: bool,
}

pub fn fubini_check(s: &DyadicSet, t: Rational) -> Result<FubiniReport> {
    if s.dim() != 2 {
        return Err(Error::InvalidSet("Fubini check needs a planar set".into()));
    }
    if t <= Rational::zero() || t > Rational::one() {
        return Err(Error::Precondition("t must lie in (0, 1]".into()));
    }
    let mut rows: BTreeMap<u32, u64> = BTreeMap::new();
    for &[_, j] in s.cells() {
        *rows.entry(j).or_default() += 1;
    }
    let side = s.side();
    let heavy = rows
        .iter()
        .filter(|(_, &n)| side * n as i128 > t)
        .map(|(&j, _)| [j, 0]);
    let f_t = DyadicSet::new(1, s.level(), heavy)?;
    let mu_s = outer_measure(s);
    let mu_f = outer_measure(&f_t);
    let hypothesis = mu_s < t * t;
    Ok(FubiniReport {
        pass: !hypothesis || mu_f <= t,
        mu_s,
        f_t,
        mu_f,
        hypothesis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn greedy_hand_example() {
        let b = [
            Interval::new(q(0, 1), q(3, 5)).unwrap(),
            Interval::new(q(1, 5), q(1, 1)).unwrap(),
        ];
        let picked = greedy_disjoint(&b);
        assert_eq!(picked, vec![1]);
        assert!(b[1].len() * 3 >= q(3, 10));
    }

    #[test]
    fn greedy_keeps_disjoint_input() {
        let b: Vec<Interval> = (0..4)
            .map(|i| Interval::new(q(i, 4), q(2 * i + 1, 8)).unwrap())
            .collect();
        let mut picked = greedy_disjoint(&b);
        picked.sort();
        assert_eq!(picked, vec![0, 1, 2, 3]);
    }

    #[test]
    fn greedy_ties_go_left() {
        let b = [
            Interval::new(q(1, 4), q(3, 4)).unwrap(),
            Interval::new(q(0, 1), q(1, 2)).unwrap(),
        ];
        assert_eq!(greedy_disjoint(&b), vec![1]);
    }

    #[test]
    fn besicovich_on_cells() {
        let target = DyadicSet::new(1, 3, [[1, 0], [2, 0], [6, 0]]).unwrap();
        let mids = [q(3, 16), q(5, 16), q(13, 16)];
        let intervals = vec![
            Interval::centered(mids[0], q(1, 8)).unwrap(),
            Interval::centered(mids[1], q(1, 16)).unwrap(),
            Interval::centered(mids[2], q(1, 16)).unwrap(),
        ];
        let r = besicovich_select(&IntervalFamily {
            intervals,
            target: target.clone(),
        })
        .unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.selected.len(), 2);
        let bad = IntervalFamily {
            intervals: vec![Interval::centered(mids[0], q(1, 16)).unwrap()],
            target,
        };
        assert!(besicovich_select(&bad).is_err());
    }

    #[test]
    fn vitali_examples() {
        let empty = DyadicSet::empty(1, 4).unwrap();
        let r = vitali_select(&empty, &DyadicIntervals::Right, q(1, 64), 8).unwrap();
        assert!(r.intervals.is_empty() && r.symdiff == Rational::zero());
        let unit = DyadicSet::full(1, 0).unwrap();
        let r = vitali_select(&unit, &DyadicIntervals::Alternate, q(1, 64), 8).unwrap();
        assert!(r.pass && r.symdiff < q(1, 64));
        let half = DyadicSet::interval(6, q(0, 1), q(1, 2)).unwrap();
        for fam in [
            DyadicIntervals::Right,
            DyadicIntervals::Left,
            DyadicIntervals::Alternate,
        ] {
            let r = vitali_select(&half, &fam, q(1, 256), 8).unwrap();
            assert!(r.pass, "{fam:?}");
            assert!(r.intervals.iter().all(|i| i.hi <= q(1, 2) + q(1, 256)));
        }
        assert!(vitali_select(&half, &DyadicIntervals::Right, q(0, 1), 8).is_err());
    }

    #[test]
    fn porosity_examples() {
        let unit = DyadicSet::full(1, 4).unwrap();
        let v = porosity_check(&unit, q(1, 4), &[1, 2, 3]).unwrap();
        assert!(v.iter().all(|p| !p.porous));
        let cantor = DyadicSet::gap_cantor(4, 8).unwrap();
        let v = porosity_check(&cantor, q(1, 4), &[2, 4, 6]).unwrap();
        assert_eq!(v.len(), 16);
        assert!(v.iter().all(|p| p.porous), "{v:?}");
        let left = DyadicSet::interval(3, q(0, 1), q(1, 2)).unwrap();
        let v = porosity_check(&left, q(1, 2), &[1, 2]).unwrap();
        let quarter = v.iter().find(|p| p.point == q(3, 16)).unwrap();
        assert!(!quarter.porous);
    }

    #[test]
    fn fubini_examples() {
        let bottom = DyadicSet::new(2, 2, (0..4).map(|i| [i, 0])).unwrap();
        let r = fubini_check(&bottom, q(1, 2)).unwrap();
        assert!(!r.hypothesis && r.pass && r.mu_f == q(1, 4));
        let r = fubini_check(&DyadicSet::empty(2, 3).unwrap(), q(1, 3)).unwrap();
        assert!(r.pass && r.mu_f == Rational::zero());
        let one = DyadicSet::new(2, 4, [[3, 7]]).unwrap();
        let r = fubini_check(&one, q(1, 2)).unwrap();
        assert!(r.hypothesis && r.pass && r.mu_s == q(1, 256) && r.mu_f == Rational::zero());
    }
}
