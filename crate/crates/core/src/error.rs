use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NfalError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular geometry: points {a:?} and {b:?} are closer than the guard radius")]
    Singularity { a: [f64; 2], b: [f64; 2] },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("peak lies on the region border; FWHM is not measurable")]
    BorderPeak,

    #[error("axis {0} has zero bandwidth; the resolution region is unbounded")]
    UnboundedRegion(usize),

    #[error("expansion pivot is degenerate (source and test point share the same ordinate)")]
    DegenerateExpansion,

    #[error("spacing mismatch: {0}")]
    SpacingMismatch(String),
}

pub type Result<T> = std::result::Result<T, NfalError>;
