use num_complex::Complex64;

use crate::error::{NfalError, Result};
use crate::exec::{map_range_with, Exec};
use crate::field::guarded_distance;
use crate::geometry::{ArrayGeometry, Scene, Vec2, SINGULARITY_GUARD};
use crate::grid::{Grid, GridSpec};
use crate::sum::ComplexSum;

/// Floor applied when converting magnitudes to dB.
pub const DB_FLOOR: f64 = -60.0;

/// Marker for cells too close to an antenna to evaluate.
pub const INVALID: Complex64 = Complex64 { re: f64::NAN, im: f64::NAN };

/// Precomputed per-antenna terms for a fixed true source.
#[derive(Clone, Debug)]
pub struct AfKernel {
    z: Vec<Vec2>,
    h_s: Vec<Complex64>,
    k: f64,
}

impl AfKernel {
    pub fn new(array: &ArrayGeometry, x_s: Vec2, k: f64) -> Result<Self> {
        if array.is_empty() {
            return Err(NfalError::InvalidArgument("empty array".into()));
        }
        let mut h_s = Vec::with_capacity(array.len());
        for &z in array.elements() {
            let d = guarded_distance(z, x_s)?;
            h_s.push(Complex64::from_polar(1.0 / d, -k * d));
        }
        Ok(AfKernel { z: array.elements().to_vec(), h_s, k })
    }

    /// `Σ h(z, x_s)·conj(h(z, p))`, or [`INVALID`] inside the singularity guard.
    pub fn value(&self, p: Vec2) -> Complex64 {
        let mut acc = ComplexSum::default();
        for (z, hs) in self.z.iter().zip(&self.h_s) {
            let d = (p - *z).norm();
            if d <= SINGULARITY_GUARD {
                return INVALID;
            }
            let (s, c) = (self.k * d).sin_cos();
            acc.add(hs * Complex64::new(c / d, s / d));
        }
        acc.value()
    }

    pub fn grid(&self, spec: GridSpec, exec: Exec) -> Grid<Complex64> {
        let values = map_range_with(exec, spec.len(), |i| self.value(spec.point(i)));
        Grid { spec, values }
    }
}

/// Discrete ambiguity function over the scene grid.
pub fn evaluate_af(array: &ArrayGeometry, scene: &Scene) -> Result<Grid<Complex64>> {
    evaluate_af_with(array, scene, Exec::Parallel)
}

pub fn evaluate_af_with(array: &ArrayGeometry, scene: &Scene, exec: Exec) -> Result<Grid<Complex64>> {
    scene.validate_for(array)?;
    let kern = AfKernel::new(array, scene.source, scene.k())?;
    Ok(kern.grid(scene.grid(), exec))
}

pub fn is_invalid(v: Complex64) -> bool {
    v.re.is_nan() || v.im.is_nan()
}

/// Magnitude in dB relative to `reference`, floored at [`DB_FLOOR`].
pub fn to_db(v: Complex64, reference: f64) -> f64 {
    if is_invalid(v) {
        return f64::NAN;
    }
    let m = v.norm() / reference;
    if m <= 0.0 {
        DB_FLOOR
    } else {
        (20.0 * m.log10()).max(DB_FLOOR)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakReport {
    pub location: Vec2,
    pub value: f64,
    pub fwhm_x: f64,
    pub fwhm_y: f64,
}

fn mag(grid: &Grid<Complex64>, ix: usize, iy: usize) -> f64 {
    let v = grid.get(ix, iy);
    if is_invalid(v) {
        f64::NEG_INFINITY
    } else {
        v.norm()
    }
}

/// Vertex offset of the parabola through three equally spaced samples, in cells.
fn parabolic_offset(a: f64, b: f64, c: f64) -> (f64, f64) {
    let den = a - 2.0 * b + c;
    if den >= 0.0 || !den.is_finite() {
        return (0.0, b);
    }
    let t = (0.5 * (a - c) / den).clamp(-0.5, 0.5);
    (t, b - 0.25 * (a - c) * t)
}

/// Width of the 50% crossings around index `i0` of a 1-D profile sampled with `step`.
fn half_width(profile: &[f64], i0: usize, level: f64, step: f64) -> Result<f64> {
    let mut hi = None;
    for i in i0 + 1..profile.len() {
        if profile[i] < level {
            let (a, b) = (profile[i - 1], profile[i]);
            hi = Some((i - 1) as f64 + (a - level) / (a - b));
            break;
        }
    }
    let mut lo = None;
    for i in (0..i0).rev() {
        if profile[i] < level {
            let (a, b) = (profile[i + 1], profile[i]);
            lo = Some((i + 1) as f64 - (a - level) / (a - b));
            break;
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) => Ok((h - l) * step),
        _ => Err(NfalError::BorderPeak),
    }
}

/// Locate the lobe peak reached by ascending from `near`, then measure FWHM per axis.
pub fn measure_peak(grid: &Grid<Complex64>, near: Vec2) -> Result<PeakReport> {
    let spec = grid.spec;
    if !spec.region.contains(near) {
        return Err(NfalError::InvalidArgument(format!("{near:?} lies outside the grid region")));
    }
    let (mut ix, mut iy) = spec.locate(near);
    loop {
        let mut best = (ix, iy, mag(grid, ix, iy));
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                if jx < 0 || jy < 0 || jx >= spec.nx as i64 || jy >= spec.ny as i64 {
                    continue;
                }
                let m = mag(grid, jx as usize, jy as usize);
                if m > best.2 {
                    best = (jx as usize, jy as usize, m);
                }
            }
        }
        if (best.0, best.1) == (ix, iy) {
            break;
        }
        ix = best.0;
        iy = best.1;
    }
    if ix == 0 || iy == 0 || ix + 1 == spec.nx || iy + 1 == spec.ny {
        return Err(NfalError::BorderPeak);
    }
    let m0 = mag(grid, ix, iy);
    let (tx, vx) = parabolic_offset(mag(grid, ix - 1, iy), m0, mag(grid, ix + 1, iy));
    let (ty, vy) = parabolic_offset(mag(grid, ix, iy - 1), m0, mag(grid, ix, iy + 1));
    let value = vx.max(vy).max(m0);
    let location = Vec2::new(spec.x(ix) + tx * spec.dx(), spec.y(iy) + ty * spec.dy());
    let row: Vec<f64> = (0..spec.nx).map(|j| mag(grid, j, iy)).collect();
    let col: Vec<f64> = (0..spec.ny).map(|j| mag(grid, ix, j)).collect();
    let fwhm_x = half_width(&row, ix, 0.5 * value, spec.dx())?;
    let fwhm_y = half_width(&col, iy, 0.5 * value, spec.dy())?;
    Ok(PeakReport { location, value, fwhm_x, fwhm_y })
}

/// FWHM of |AF| along `dir` through `center`, sampled directly with `n` points over
/// `[−half_len, half_len]`.
pub fn fwhm_along(kernel: &AfKernel, center: Vec2, dir: Vec2, half_len: f64, n: usize) -> Result<f64> {
    if n < 5 {
        return Err(NfalError::InvalidArgument("profile needs at least 5 samples".into()));
    }
    let u = dir * (1.0 / dir.norm());
    let step = 2.0 * half_len / (n as f64 - 1.0);
    let profile: Vec<f64> = crate::exec::map_range(n, |i| {
        let v = kernel.value(center + u * (-half_len + i as f64 * step));
        if is_invalid(v) {
            f64::NEG_INFINITY
        } else {
            v.norm()
        }
    });
    let i0 = n / 2;
    let (_, peak) = parabolic_offset(profile[i0 - 1], profile[i0], profile[i0 + 1]);
    half_width(&profile, i0, 0.5 * peak.max(profile[i0]), step)
}
