//! Exact finite-resolution measure theory on `[0, 1]` and `[0, 1]²`.

mod ac;
mod covering;
mod dyadic;
mod func;
mod stiff;

pub use ac::{
    ac_modulus, cantor_exact, cantor_gap_cells, cantor_witness, centered_interval,
    differentiability_profile, image_null_check, level_jumps, stretch_classify, superadditive_on,
    variation_decompose, CantorWitness, DifferentiabilityProfile, ImageCover, IntervalFunction,
    ModulusRow, StretchReport, StretchVerdict, VariationReport,
};
pub use covering::{
    besicovich_select, covered, fubini_check, greedy_disjoint, porosity_check,
    symmetric_difference, vitali_select, BesicovichReport, DyadicIntervals, FubiniReport, Interval,
    IntervalFamily, PartialPartition, PorosityVerdict, RenewableFamily, VitaliReport,
};
pub use dyadic::{
    dyadic, inner_disk_measure, outer_measure, overlap, DiskPacking, DyadicLiteral, DyadicSet,
    Rational, MAX_LEVEL,
};
pub use func::{cantor_staircase, Func1D, SampleTable, StandardFunction};
pub use stiff::{stiff_line_ac_check, StiffLineOptions, StiffLineReport, StripMeasure};
