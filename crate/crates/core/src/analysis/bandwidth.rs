use std::f64::consts::TAU;

use super::Projection;
use crate::error::{NfalError, Result};
use crate::field::guarded_distance;
use crate::geometry::{ArrayGeometry, SampleAxis, Vec2};

/// Coordinate frame for bandwidth and resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    /// Axes x and y.
    AxisAligned,
    /// Axis 1 along `x_s − centroid`, axis 2 its counter-clockwise normal.
    BeamAligned,
    /// Radial and angular axes about the polar layout centre (origin for non-polar arrays).
    Polar,
}

impl Frame {
    pub fn axes(self, array: &ArrayGeometry, x_s: Vec2) -> Result<[SampleAxis; 2]> {
        Ok(match self {
            Frame::AxisAligned => [SampleAxis::Dir(Vec2::new(1.0, 0.0)), SampleAxis::Dir(Vec2::new(0.0, 1.0))],
            Frame::BeamAligned => {
                let b = x_s - array.centroid();
                let n = b.norm();
                if !(n > 0.0) {
                    return Err(NfalError::InvalidArgument(
                        "beam-aligned frame is undefined when the source sits at the array centroid".into(),
                    ));
                }
                let u = b * (1.0 / n);
                [SampleAxis::Dir(u), SampleAxis::Dir(u.perp())]
            }
            Frame::Polar => {
                let center = array.polar_layout().map(|l| l.center).unwrap_or(Vec2::ZERO);
                [SampleAxis::Radial { center }, SampleAxis::Angular { center }]
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisBand {
    pub axis: SampleAxis,
    pub k_min: f64,
    pub k_max: f64,
    /// Index of the antenna attaining `k_min` (first on ties).
    pub argmin: usize,
    pub argmax: usize,
}

impl AxisBand {
    pub fn bandwidth(&self) -> f64 {
        self.k_max - self.k_min
    }

    /// `2π/B`, infinite for zero bandwidth.
    pub fn resolution(&self) -> f64 {
        let b = self.bandwidth();
        if b > 0.0 {
            TAU / b
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandwidthReport {
    pub frame: Frame,
    pub axes: Vec<AxisBand>,
}

/// Extrema of the local chirp frequency `k_h` over the array, per frame axis.
pub fn bandwidth(array: &ArrayGeometry, x_s: Vec2, k: f64, frame: Frame) -> Result<BandwidthReport> {
    if array.is_empty() {
        return Err(NfalError::InvalidArgument("empty array".into()));
    }
    let axes = frame.axes(array, x_s)?;
    let mut dirs = Vec::with_capacity(array.len());
    for &z in array.elements() {
        let d = guarded_distance(z, x_s)?;
        dirs.push((x_s - z) * (1.0 / d));
    }
    let mut out = Vec::with_capacity(2);
    for axis in axes {
        let proj = Projection::new(array, &axis);
        let mut band = AxisBand { axis, k_min: f64::INFINITY, k_max: f64::NEG_INFINITY, argmin: 0, argmax: 0 };
        for (n, (d, v)) in dirs.iter().zip(&proj.vecs).enumerate() {
            let c = k * d.dot(*v);
            if c < band.k_min {
                band.k_min = c;
                band.argmin = n;
            }
            if c > band.k_max {
                band.k_max = c;
                band.argmax = n;
            }
        }
        out.push(band);
    }
    Ok(BandwidthReport { frame, axes: out })
}
