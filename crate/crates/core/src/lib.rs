//! Computational hyperbolic geometry in the upper half-space model, certified bi-Lipschitz
//! maps with their boundary extensions, verifiers for the tube and Morse estimates, zooming
//! and derivative machinery for boundary homeomorphisms, and an exact finite-resolution
//! measure toolkit.
//!
//! The geometric core is generic over [`Real`] (`f32` or `f64`); the `D*` aliases fix `f64`.

pub mod error;
pub mod hyperbolic;
pub mod measure;
pub mod morse;
pub mod quasi;
pub mod scalar;
pub mod zoom;

pub use error::{Error, Result};
pub use scalar::{Real, Tolerances};

pub use num_complex::Complex;

pub type DPointH3 = hyperbolic::PointH3<f64>;
pub type DSpherePoint = hyperbolic::SpherePoint<f64>;
pub type DMobius = hyperbolic::MobiusMap<f64>;
pub type DGeodesic = hyperbolic::Geodesic<f64>;
pub type DPath = hyperbolic::PathH3<f64>;
pub type DBLMap = quasi::BLMap<f64>;
pub type DLinearStretch = quasi::LinearStretch<f64>;
pub type DBoundaryHomeo = zoom::BoundaryHomeo<f64>;
