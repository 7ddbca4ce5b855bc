use thiserror::Error;

/// Errors raised by the geometric and measure-theoretic operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("degenerate geodesic: endpoints coincide")]
    DegenerateGeodesic,
    #[error("degenerate Möbius map: {0}")]
    DegenerateMobius(String),
    #[error("points are not pairwise distinct")]
    CoincidentPoints,
    #[error("path needs at least two samples, got {0}")]
    PathTooShort(usize),
    #[error("path has repeated consecutive sample at index {0}")]
    RepeatedSample(usize),
    #[error("singular matrix (det = {0})")]
    SingularMatrix(f64),
    #[error("empty composition")]
    EmptyComposition,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("pole inside the region: {0}")]
    Pole(String),
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
