use super::afr::RegionMask;
use super::bandwidth::{bandwidth, BandwidthReport, Frame};
use super::probe_vector;
use crate::error::Result;
use crate::exec::map_range;
use crate::geometry::{ArrayGeometry, Vec2, SINGULARITY_GUARD};
use crate::grid::GridSpec;

/// Tolerance on the closed interval test, as a multiple of k.
pub const NCZ_TOL_REL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct NczReport {
    pub bandwidth: BandwidthReport,
    pub per_axis: Vec<RegionMask>,
    /// Intersection over axes.
    pub all: RegionMask,
    /// Probes within the singularity guard of the source.
    pub invalid: Vec<bool>,
}

impl NczReport {
    /// Per-axis classification of a single probe; `None` when singular.
    pub fn classify(&self, p: Vec2, x_s: Vec2, k: f64) -> Option<Vec<bool>> {
        classify(&self.bandwidth, p, x_s, k)
    }
}

fn classify(bw: &BandwidthReport, p: Vec2, x_s: Vec2, k: f64) -> Option<Vec<bool>> {
    let diff = x_s - p;
    let d = diff.norm();
    if d <= SINGULARITY_GUARD {
        return None;
    }
    let tol = NCZ_TOL_REL * k;
    Some(
        bw.axes
            .iter()
            .map(|band| {
                let c = k * diff.dot(probe_vector(&band.axis, p)) / d;
                c >= band.k_min - tol && c <= band.k_max + tol
            })
            .collect(),
    )
}

/// Non-contributive zone over a probe grid.
pub fn ncz(array: &ArrayGeometry, x_s: Vec2, k: f64, frame: Frame, probes: GridSpec) -> Result<NczReport> {
    let bw = bandwidth(array, x_s, k, frame)?;
    let cls = map_range(probes.len(), |i| classify(&bw, probes.point(i), x_s, k));
    let naxes = bw.axes.len();
    let invalid: Vec<bool> = cls.iter().map(|c| c.is_none()).collect();
    let per_axis = (0..naxes)
        .map(|a| RegionMask::from_bits(probes, cls.iter().map(|c| c.as_ref().is_some_and(|v| v[a])).collect()))
        .collect();
    let all = RegionMask::from_bits(probes, cls.iter().map(|c| c.as_ref().is_some_and(|v| v.iter().all(|&b| b))).collect());
    Ok(NczReport { bandwidth: bw, per_axis, all, invalid })
}
