//! Scalar abstraction shared by the geometric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Numeric tolerances used across the crate.
///
/// Kept as `f64` and converted on use so that a single record serves every scalar type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Geometric comparisons (distances, unit speed, evaluation checks).
    pub geometry: f64,
    /// Relative stopping criterion for adaptive arc-length refinement.
    pub integration: f64,
    /// Allowed drift of `ad - bc` from 1 after normalization.
    pub normalization: f64,
    /// `|cz + d|` below this switches to the chart at infinity.
    pub pole: f64,
    /// Maximum number of segments used by adaptive refinement.
    pub max_segments: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        geometry: 1e-9,
        integration: 1e-8,
        normalization: 1e-12,
        pole: 1e-8,
        max_segments: 1 << 20,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
