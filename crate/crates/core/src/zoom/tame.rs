use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{dist_h3, MobiusMap, PointH3};
use crate::quasi::BLMap;
use crate::scalar::Real;

/// A sequence `n ↦ g_n` of isometries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "snake_case",
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub enum IsometrySequence<T> {
    /// `g_n = identity`.
    Identity,
    /// `g_n = z ↦ center + n^exponent (z − center)`.
    Homothety { center: Complex<T>, exponent: T },
    /// `g_n = list[(n − 1) mod len]`.
    Cycle { list: Vec<MobiusMap<T>> },
}

impl<T: Real> IsometrySequence<T> {
    pub fn at(&self, n: u64) -> Result<MobiusMap<T>> {
        match self {
            IsometrySequence::Identity => Ok(MobiusMap::identity()),
            IsometrySequence::Homothety { center, exponent } => {
                let k = T::from_u64(n).expect("fits").powf(*exponent);
                MobiusMap::homothety_about(*center, k)
            }
            IsometrySequence::Cycle { list } => {
                if list.is_empty() {
                    return Err(Error::Precondition("empty isometry list".into()));
                }
                Ok(list[((n - 1) % list.len() as u64) as usize])
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TamenessReport<T> {
    pub bounded: bool,
    /// `sup_n d((0,1), H_n(p))` over `n ≤ n_max`.
    pub sup_distance: T,
    /// The `n` attaining the supremum.
    pub witness_n: u64,
    /// Growth of the running supremum over the second half of the range.
    pub late_growth: T,
}

/// Evaluates `H_n(p) = f_n(H(g_n(p)))` for `n = 1..=n_max` and flags the orbit bounded when it
/// stays within `radius` of `(0, 1)` and its running supremum grows by at most `0.05` over
/// `n ∈ (n_max/2, n_max]`. This is a bounded-witness heuristic, not a proof.
pub fn tameness_probe<T: Real>(
    post: &IsometrySequence<T>,
    pre: &IsometrySequence<T>,
    h: &BLMap<T>,
    p: &PointH3<T>,
    n_max: u64,
    radius: T,
) -> Result<TamenessReport<T>> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let origin = PointH3::origin();
    let half = n_max / 2;
    let (mut sup, mut witness, mut sup_early) = (T::zero(), 1, T::zero());
    for n in 1..=n_max {
        let q = post
            .at(n)?
            .apply_point(&h.apply(&pre.at(n)?.apply_point(p)));
        let d = dist_h3(&origin, &q);
        if d > sup {
            (sup, witness) = (d, n);
        }
        if n == half {
            sup_early = sup;
        }
    }
    let late_growth = sup - sup_early;
    Ok(TamenessReport {
        bounded: sup <= radius && late_growth <= T::lit(0.05),
        sup_distance: sup,
        witness_n: witness,
        late_growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn constant_sequence_is_bounded() {
        let id = IsometrySequence::Identity;
        let r = tameness_probe(
            &id,
            &id,
            &BLMap::identity(),
            &PointH3::from_xyt(0.3, 0.1, 2.0).unwrap(),
            1024,
            10.0,
        )
        .unwrap();
        assert!(r.bounded);
    }

    #[test]
    fn scaling_sequence_escapes() {
        let post = IsometrySequence::Homothety {
            center: c(0.0, 0.0),
            exponent: 1.0,
        };
        let r = tameness_probe(
            &post,
            &IsometrySequence::Identity,
            &BLMap::identity(),
            &PointH3::origin(),
            1024,
            10.0,
        )
        .unwrap();
        assert!(!r.bounded);
        assert!((r.sup_distance - 1024f64.ln()).abs() < 1e-9);
        assert_eq!(r.witness_n, 1024);
    }

    #[test]
    fn zoom_of_conformal_affine_map_is_bounded() {
        let (a, b, z) = (c(1.0, 2.0), c(0.5, -1.0), c(0.25, 0.75));
        let h = BLMap::isometry(MobiusMap::affine(a, b).unwrap());
        let pre = IsometrySequence::Homothety {
            center: z,
            exponent: -1.0,
        };
        let post = IsometrySequence::Homothety {
            center: a * z + b,
            exponent: 1.0,
        };
        let p = PointH3::from_xyt(0.1, 0.2, 0.5).unwrap();
        let r = tameness_probe(&post, &pre, &h, &p, 1024, 10.0).unwrap();
        assert!(r.bounded, "{r:?}");
        assert!(r.late_growth < 1e-9);
    }
}
