//! Chirp-based predictions: bandwidth, matched frequency, AFR, NCZ, CAE and the
//! proposition checkers.

mod afr;
mod bandwidth;
mod ncz;
mod props;
mod resolution;
mod safe;

pub use afr::{afr, afr_axes, boundary_points, max_matched_frequency, BoundaryPoint, CaeEntry, MatchedField, RegionMask};
pub use bandwidth::{bandwidth, AxisBand, BandwidthReport, Frame};
pub use ncz::{ncz, NczReport, NCZ_TOL_REL};
pub use props::{check_addition, check_inclusion, check_removal, InclusionReport, PropReport, Verdict};
pub use resolution::{resolution_box, resolution_region, ResolutionBox};
pub use safe::{safe_spacing, ArrayKind};

use crate::geometry::{from_polar, ArrayGeometry, SampleAxis, Vec2};

/// Per-antenna projection vectors for one analysis axis.
///
/// The axis component of `k_h(z_n, x)` is `k (x − z_n)·v_n / ‖x − z_n‖`. For a
/// Cartesian direction `v_n` is that direction; for the radial polar axis it is
/// the unit radial vector at `z_n`; for the angular axis it is `r_z` times the
/// unit tangential vector, which reproduces the θ-derivative with its r_z factor.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Projection {
    pub vecs: Vec<Vec2>,
}

impl Projection {
    pub fn new(array: &ArrayGeometry, axis: &SampleAxis) -> Self {
        let n = array.len();
        let vecs = match *axis {
            SampleAxis::Dir(u) => vec![u; n],
            SampleAxis::Radial { center } => polar_frames(array, center).into_iter().map(|(r, _, _)| r).collect(),
            SampleAxis::Angular { center } => {
                polar_frames(array, center).into_iter().map(|(_, t, rz)| t * rz).collect()
            }
        };
        Projection { vecs }
    }
}

/// Projection of an arbitrary point for the same axis (used for NCZ probes).
pub(crate) fn probe_vector(axis: &SampleAxis, p: Vec2) -> Vec2 {
    match *axis {
        SampleAxis::Dir(u) => u,
        SampleAxis::Radial { center } => {
            let (r, t) = crate::geometry::to_polar(p - center);
            if r == 0.0 {
                Vec2::ZERO
            } else {
                from_polar(1.0, t)
            }
        }
        SampleAxis::Angular { center } => {
            let (r, t) = crate::geometry::to_polar(p - center);
            from_polar(1.0, t).perp() * r
        }
    }
}

/// `(r̂, θ̂, r_z)` per antenna about `center`, using the builder's unwrapped angles when available.
fn polar_frames(array: &ArrayGeometry, center: Vec2) -> Vec<(Vec2, Vec2, f64)> {
    let same_center = array.polar_layout().map(|l| l.center == center).unwrap_or(false);
    match (array.polar_coords(), same_center) {
        (Some(pc), true) => pc
            .iter()
            .map(|&(r, t)| {
                let rhat = from_polar(1.0, t);
                (rhat, rhat.perp(), r)
            })
            .collect(),
        _ => array
            .elements()
            .iter()
            .map(|&z| {
                let (r, t) = crate::geometry::to_polar(z - center);
                let rhat = from_polar(1.0, t);
                (if r == 0.0 { Vec2::ZERO } else { rhat }, rhat.perp(), r)
            })
            .collect(),
    }
}
