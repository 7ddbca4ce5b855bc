//! Boundary homeomorphisms and the zoom, derivative and disk-ratio machinery.

mod derivative;
mod disk;
mod homeo;
mod lines;
mod tame;

pub use derivative::{
    asterisk_scan, asterisk_test, default_directions, default_schedule, directional_derivative,
    zoom_step, AsteriskReport, DerivativeEstimate, DerivativeOptions, ScanGrid, ZoomStep,
};
pub use disk::{disk_ratio, smallest_enclosing_disk, Disk, DiskRatio};
pub use homeo::{BoundaryHomeo, HomeoPrimitive, RealAffine, ShearProfile};
pub use lines::{
    circle_points, conformal_fit, good_line_test, two_direction_check, ConformalFit, Line, LineFit,
    TwoDirectionReport,
};
pub use tame::{tameness_probe, IsometrySequence, TamenessReport};
