use std::f64::consts::{PI, TAU};

use super::afr::RegionMask;
use super::bandwidth::{bandwidth, Frame};
use crate::error::{NfalError, Result};
use crate::geometry::{to_polar, ArrayGeometry, SampleAxis, Vec2};
use crate::grid::GridSpec;

/// Box of half-widths `δ_i/2` about the source in the chosen frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolutionBox {
    pub center: Vec2,
    pub axes: [SampleAxis; 2],
    /// Full widths `δ_i = 2π/B_i` (radians for the angular axis).
    pub widths: [f64; 2],
}

fn wrap(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

impl ResolutionBox {
    pub fn contains(&self, p: Vec2) -> bool {
        self.axes.iter().zip(&self.widths).all(|(axis, w)| {
            let off = match *axis {
                SampleAxis::Dir(u) => (p - self.center).dot(u),
                SampleAxis::Radial { center } => to_polar(p - center).0 - to_polar(self.center - center).0,
                SampleAxis::Angular { center } => wrap(to_polar(p - center).1 - to_polar(self.center - center).1),
            };
            off.abs() <= 0.5 * w
        })
    }
}

pub fn resolution_box(array: &ArrayGeometry, x_s: Vec2, k: f64, frame: Frame) -> Result<ResolutionBox> {
    let bw = bandwidth(array, x_s, k, frame)?;
    let mut widths = [0.0; 2];
    for (i, band) in bw.axes.iter().enumerate() {
        let d = band.resolution();
        if !d.is_finite() {
            return Err(NfalError::UnboundedRegion(i));
        }
        widths[i] = d;
    }
    Ok(ResolutionBox { center: x_s, axes: [bw.axes[0].axis, bw.axes[1].axis], widths })
}

pub fn resolution_region(array: &ArrayGeometry, x_s: Vec2, k: f64, frame: Frame, spec: GridSpec) -> Result<RegionMask> {
    let b = resolution_box(array, x_s, k, frame)?;
    let bits = (0..spec.len()).map(|i| b.contains(spec.point(i))).collect();
    Ok(RegionMask::from_bits(spec, bits))
}
