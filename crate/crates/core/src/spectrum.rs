//! Direct-sum spatial spectra of the received field and of the matched product.

use num_complex::Complex64;

use crate::error::{NfalError, Result};
use crate::exec::{map_range_with, Exec};
use crate::field::guarded_distance;
use crate::geometry::{ArrayGeometry, CoordSystem, Vec2};
use crate::grid::{GridSpec, Rect};
use crate::sum::ComplexSum;

/// Default support threshold as a fraction of the peak magnitude.
pub const DEFAULT_THRESHOLD: f64 = 0.5;
/// Default spectrum grid shape per axis.
pub const DEFAULT_SHAPE: usize = 256;

/// Which field is transformed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectrumSource {
    /// Received field `h(z, x_s)`.
    H { x_s: Vec2 },
    /// Matched product `g(z; x̃_s, x_s)`.
    G { x_tilde: Vec2, x_s: Vec2 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEstimate {
    pub coords: CoordSystem,
    pub spec: GridSpec,
    pub magnitudes: Vec<f64>,
    pub peak: f64,
    pub threshold: f64,
    /// Per-axis `[k_min, k_max]` of the thresholded support (cell centres).
    pub support: [(f64, f64); 2],
}

impl SpectrumEstimate {
    /// Largest |k| on each axis inside the support.
    pub fn half_extent(&self, axis: usize) -> f64 {
        let (lo, hi) = self.support[axis];
        lo.abs().max(hi.abs())
    }

    pub fn cell(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.spec.dx()
        } else {
            self.spec.dy()
        }
    }
}

/// `[−2.2k, 2.2k]²`.
pub fn default_region(k: f64) -> Rect {
    let e = 2.2 * k;
    Rect::new(-e, e, -e, e)
}

/// `k_r ∈ [−2.2k, 2.2k]`, `k_θ ∈ [−2.2kR, 2.2kR]` with R the outer radius.
pub fn default_polar_region(k: f64, r_max: f64) -> Rect {
    let e = 2.2 * k;
    Rect::new(-e, e, -e * r_max, e * r_max)
}

fn weights(array: &ArrayGeometry, src: SpectrumSource, k: f64) -> Result<Vec<Complex64>> {
    array
        .elements()
        .iter()
        .map(|&z| match src {
            SpectrumSource::H { x_s } => crate::field::channel(z, x_s, k),
            SpectrumSource::G { x_tilde, x_s } => {
                // Same arithmetic as the AF kernel so G(0) reproduces AF(x̃_s).
                let ds = guarded_distance(z, x_s)?;
                let dt = guarded_distance(z, x_tilde)?;
                let hs = Complex64::from_polar(1.0 / ds, -k * ds);
                let (s, c) = (k * dt).sin_cos();
                Ok(hs * Complex64::new(c / dt, s / dt))
            }
        })
        .collect()
}

/// Transform of `w` at one wavevector: `Σ w_n e^{−j(k1·c1_n + k2·c2_n)}`.
pub fn transform_at(w: &[Complex64], coords: &[(f64, f64)], kv: (f64, f64)) -> Complex64 {
    let mut acc = ComplexSum::default();
    for (wn, &(a, b)) in w.iter().zip(coords) {
        let (s, c) = (kv.0 * a + kv.1 * b).sin_cos();
        acc.add(wn * Complex64::new(c, -s));
    }
    acc.value()
}

fn validate(region: Rect, shape: (usize, usize), threshold: f64) -> Result<GridSpec> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(NfalError::InvalidArgument(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    GridSpec::new(region, shape.0, shape.1)
}

fn direct_sum(
    w: &[Complex64],
    coords: &[(f64, f64)],
    spec: GridSpec,
    threshold: f64,
    system: CoordSystem,
    exec: Exec,
) -> SpectrumEstimate {
    let n = w.len();
    // Separable phasor tables: e^{−j(k1 a + k2 b)} = e^{−j k1 a}·e^{−j k2 b}.
    let table = |m: usize, kof: &dyn Fn(usize) -> f64, pick: &dyn Fn(&(f64, f64)) -> f64| -> Vec<Complex64> {
        let mut t = Vec::with_capacity(m * n);
        for i in 0..m {
            let kv = kof(i);
            for c in coords {
                let (s, co) = (kv * pick(c)).sin_cos();
                t.push(Complex64::new(co, -s));
            }
        }
        t
    };
    let ta = table(spec.nx, &|i| spec.x(i), &|c| c.0);
    let tb = table(spec.ny, &|j| spec.y(j), &|c| c.1);
    let rows: Vec<Vec<f64>> = map_range_with(exec, spec.ny, |j| {
        let wb: Vec<Complex64> = (0..n).map(|m| w[m] * tb[j * n + m]).collect();
        (0..spec.nx)
            .map(|i| {
                let a = &ta[i * n..(i + 1) * n];
                let mut acc = ComplexSum::default();
                for (x, y) in wb.iter().zip(a) {
                    acc.add(x * y);
                }
                acc.value().norm()
            })
            .collect()
    });
    let magnitudes: Vec<f64> = rows.into_iter().flatten().collect();
    let peak = magnitudes.iter().cloned().fold(0.0, f64::max);
    let support = support_box(&spec, &magnitudes, threshold * peak);
    SpectrumEstimate { coords: system, spec, magnitudes, peak, threshold, support }
}

fn support_box(spec: &GridSpec, mags: &[f64], level: f64) -> [(f64, f64); 2] {
    let mut b = [(f64::INFINITY, f64::NEG_INFINITY); 2];
    for (idx, &m) in mags.iter().enumerate() {
        if m >= level {
            let p = spec.point(idx);
            b[0] = (b[0].0.min(p.x), b[0].1.max(p.x));
            b[1] = (b[1].0.min(p.y), b[1].1.max(p.y));
        }
    }
    b
}

fn cartesian_coords(array: &ArrayGeometry) -> Vec<(f64, f64)> {
    array.elements().iter().map(|p| (p.x, p.y)).collect()
}

fn polar_coords(array: &ArrayGeometry) -> Result<Vec<(f64, f64)>> {
    array
        .polar_coords()
        .map(|v| v.to_vec())
        .ok_or_else(|| NfalError::InvalidArgument("polar spectrum needs a polar-tagged array".into()))
}

pub fn spectrum_g(
    array: &ArrayGeometry,
    x_tilde: Vec2,
    x_s: Vec2,
    k: f64,
    region: Rect,
    shape: (usize, usize),
    threshold: f64,
) -> Result<SpectrumEstimate> {
    let spec = validate(region, shape, threshold)?;
    let w = weights(array, SpectrumSource::G { x_tilde, x_s }, k)?;
    Ok(direct_sum(&w, &cartesian_coords(array), spec, threshold, CoordSystem::Cartesian, Exec::Parallel))
}

pub fn spectrum_h(
    array: &ArrayGeometry,
    x_s: Vec2,
    k: f64,
    region: Rect,
    shape: (usize, usize),
    threshold: f64,
) -> Result<SpectrumEstimate> {
    spectrum_with(array, SpectrumSource::H { x_s }, k, region, shape, threshold, Exec::Parallel)
}

/// Cartesian spectrum with an explicit execution path.
pub fn spectrum_with(
    array: &ArrayGeometry,
    src: SpectrumSource,
    k: f64,
    region: Rect,
    shape: (usize, usize),
    threshold: f64,
    exec: Exec,
) -> Result<SpectrumEstimate> {
    let spec = validate(region, shape, threshold)?;
    let w = weights(array, src, k)?;
    Ok(direct_sum(&w, &cartesian_coords(array), spec, threshold, CoordSystem::Cartesian, exec))
}

/// Spectrum over the `(r_z, θ_z)` sample coordinates of a polar array.
pub fn spectrum_polar(
    array: &ArrayGeometry,
    src: SpectrumSource,
    k: f64,
    region: Rect,
    shape: (usize, usize),
    threshold: f64,
) -> Result<SpectrumEstimate> {
    let spec = validate(region, shape, threshold)?;
    let layout = array
        .polar_layout()
        .ok_or_else(|| NfalError::InvalidArgument("polar spectrum needs a polar-tagged array".into()))?;
    let coords = polar_coords(array)?;
    // Field points are expressed about the layout centre, like the sample coordinates.
    let c = layout.center;
    let shifted = match src {
        SpectrumSource::H { x_s } => SpectrumSource::H { x_s: x_s - c },
        SpectrumSource::G { x_tilde, x_s } => SpectrumSource::G { x_tilde: x_tilde - c, x_s: x_s - c },
    };
    let local = ArrayGeometry::from_points(array.elements().iter().map(|&p| p - c).collect())?;
    let w = weights(&local, shifted, k)?;
    Ok(direct_sum(&w, &coords, spec, threshold, CoordSystem::Polar, Exec::Parallel))
}

/// G at a single wavevector; `G(0)` equals the ambiguity function at `x_tilde`.
pub fn g_at(array: &ArrayGeometry, x_tilde: Vec2, x_s: Vec2, k: f64, kv: Vec2) -> Result<Complex64> {
    let w = weights(array, SpectrumSource::G { x_tilde, x_s }, k)?;
    Ok(transform_at(&w, &cartesian_coords(array), (kv.x, kv.y)))
}
