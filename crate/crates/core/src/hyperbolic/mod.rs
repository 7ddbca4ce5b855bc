//! The upper half-space model `C × (0, ∞)` of hyperbolic 3-space.
//!
//! Points, boundary points on the Riemann sphere, orientation-tracked Möbius maps acting by
//! Poincaré extension, geodesics, nearest-point projections and arc length of sampled paths.

mod geodesic;
mod mobius;
mod path;
mod point;

pub use geodesic::{
    dist_to_geodesic, geodesic_from_endpoints, geodesic_point, geodesic_through, Geodesic,
    GeodesicSegment, GeodesicShape,
};
pub use mobius::{apply_isometry, normalize_triple, MobiusMap, Orientation};
pub use path::{chord_length, chord_length_refined, path_lengths, PathH3, PathLengths};
pub use point::{chordal_distance, dist_h3, project_vertical, PointH3, SpherePoint};
