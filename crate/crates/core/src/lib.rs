//! Near-field localisation ambiguity functions for planar antenna arrays, with
//! chirp-based predictions of the aliasing-free region, resolution, non-contributive
//! zone and critical antennas, and a direct-sum spectral oracle to check them.
//!
//! All lengths are in wavelengths unless a scene says otherwise; `k = 2π/λ`.

// `!(a < b)` comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambiguity;
pub mod analysis;
pub mod contour;
pub mod error;
pub mod exec;
pub mod field;
pub mod geometry;
pub mod grid;
pub mod loci;
pub mod roots;
pub mod spectrum;
pub mod sum;

pub use error::{NfalError, Result};
pub use geometry::{ArrayGeometry, Scene, Vec2};
pub use grid::{Grid, GridSpec, Rect};
