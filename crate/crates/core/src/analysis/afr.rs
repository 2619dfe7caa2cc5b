use std::f64::consts::TAU;

use super::Projection;
use crate::contour::boundary_polylines;
use crate::error::{NfalError, Result};
use crate::exec::map_range;
use crate::field::guarded_distance;
use crate::geometry::{ArrayGeometry, SampleAxis, Scene, Vec2, SINGULARITY_GUARD};
use crate::grid::GridSpec;
use crate::roots::bisect;

/// CAE tie tolerance, as a multiple of k.
pub const CAE_TIE_REL: f64 = 1e-9;

/// Prepared evaluator of the matched-product frequency `k_g` for a fixed source.
#[derive(Clone, Debug)]
pub struct MatchedField {
    k: f64,
    z: Vec<Vec2>,
    axes: Vec<SampleAxis>,
    thresholds: Vec<f64>,
    proj: Vec<Projection>,
    /// `k_h(z_n, x_s)` component per axis and antenna.
    at_source: Vec<Vec<f64>>,
}

/// Antennas attaining the maximum |k_g| component at one test point and axis.
#[derive(Clone, Debug, PartialEq)]
pub struct CaeEntry {
    pub value: f64,
    pub indices: Vec<usize>,
}

impl MatchedField {
    /// Uses the array's own sampling axes with thresholds `2π/Δ_i`.
    pub fn new(array: &ArrayGeometry, x_s: Vec2, k: f64) -> Result<Self> {
        let axes = array.sample_axes()?;
        Self::with_axes(array, x_s, k, axes.into_iter().map(|(a, d)| (a, TAU / d)).collect())
    }

    /// Explicit `(axis, threshold)` list.
    pub fn with_axes(array: &ArrayGeometry, x_s: Vec2, k: f64, axes: Vec<(SampleAxis, f64)>) -> Result<Self> {
        if array.is_empty() {
            return Err(NfalError::InvalidArgument("empty array".into()));
        }
        let z = array.elements().to_vec();
        let mut dist = Vec::with_capacity(z.len());
        for &p in &z {
            dist.push(guarded_distance(p, x_s)?);
        }
        let proj: Vec<Projection> = axes.iter().map(|(a, _)| Projection::new(array, a)).collect();
        // Same expression as the per-cell evaluation so that K vanishes exactly at x_s.
        let at_source = proj
            .iter()
            .map(|pr| (0..z.len()).map(|n| k * (x_s - z[n]).dot(pr.vecs[n]) / dist[n]).collect())
            .collect();
        Ok(MatchedField {
            k,
            z,
            axes: axes.iter().map(|a| a.0).collect(),
            thresholds: axes.iter().map(|a| a.1).collect(),
            proj,
            at_source,
        })
    }

    pub fn axes(&self) -> &[SampleAxis] {
        &self.axes
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Signed `k_g` component for every antenna on one axis; `None` if singular.
    pub fn components(&self, x_tilde: Vec2, axis: usize) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(self.z.len());
        for (n, &z) in self.z.iter().enumerate() {
            let d = (x_tilde - z).norm();
            if d <= SINGULARITY_GUARD {
                return None;
            }
            let c = self.k * (x_tilde - z).dot(self.proj[axis].vecs[n]) / d;
            out.push(self.at_source[axis][n] - c);
        }
        Some(out)
    }

    /// `K_i(x̃)` per axis; `None` if `x̃` is within the singularity guard of an antenna.
    pub fn k_max(&self, x_tilde: Vec2) -> Option<Vec<f64>> {
        let mut best = vec![0.0f64; self.axes.len()];
        for (n, &z) in self.z.iter().enumerate() {
            let diff = x_tilde - z;
            let d = diff.norm();
            if d <= SINGULARITY_GUARD {
                return None;
            }
            for (i, b) in best.iter_mut().enumerate() {
                let c = (self.at_source[i][n] - self.k * diff.dot(self.proj[i].vecs[n]) / d).abs();
                if c > *b {
                    *b = c;
                }
            }
        }
        Some(best)
    }

    /// CAE set on one axis.
    pub fn cae(&self, x_tilde: Vec2, axis: usize) -> Option<CaeEntry> {
        let comps = self.components(x_tilde, axis)?;
        let value = comps.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tol = CAE_TIE_REL * self.k;
        let indices = comps
            .iter()
            .enumerate()
            .filter(|(_, c)| (c.abs() - value).abs() <= tol)
            .map(|(n, _)| n)
            .collect();
        Some(CaeEntry { value, indices })
    }

    /// `max_i (K_i − T_i)/T_i`: non-positive inside the AFR. NaN when singular.
    pub fn margin(&self, x_tilde: Vec2) -> f64 {
        match self.k_max(x_tilde) {
            Some(ks) => ks
                .iter()
                .zip(&self.thresholds)
                .map(|(kv, t)| (kv - t) / t)
                .fold(f64::NEG_INFINITY, f64::max),
            None => f64::NAN,
        }
    }

    /// Axis with the largest normalised margin.
    pub fn active_axis(&self, x_tilde: Vec2) -> Option<usize> {
        let ks = self.k_max(x_tilde)?;
        let mut best = (0, f64::NEG_INFINITY);
        for (i, (kv, t)) in ks.iter().zip(&self.thresholds).enumerate() {
            let m = (kv - t) / t;
            if m > best.1 {
                best = (i, m);
            }
        }
        Some(best.0)
    }

    /// Aliasing condition `K_i ≤ 2π/Δ_i` on every axis. Singular points fail.
    pub fn allowed(&self, x_tilde: Vec2) -> bool {
        match self.k_max(x_tilde) {
            Some(ks) => ks.iter().zip(&self.thresholds).all(|(kv, t)| kv <= t),
            None => false,
        }
    }
}

/// `K_i` and the CAE set for one axis of the array's own sampling axes.
pub fn max_matched_frequency(
    array: &ArrayGeometry,
    x_tilde: Vec2,
    x_s: Vec2,
    k: f64,
    axis: SampleAxis,
) -> Result<(f64, CaeEntry)> {
    let f = MatchedField::with_axes(array, x_s, k, vec![(axis, 1.0)])?;
    for &z in array.elements() {
        guarded_distance(z, x_tilde)?;
    }
    let cae = f.cae(x_tilde, 0).expect("guard checked above");
    Ok((cae.value, cae))
}

/// Boolean cell mask with boundary polylines.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionMask {
    pub spec: GridSpec,
    pub bits: Vec<bool>,
    pub boundary: Vec<Vec<Vec2>>,
    /// Cell sampled at a point other than its centre (the source cell of an AFR).
    pub anchor: Option<(usize, Vec2)>,
}

impl RegionMask {
    pub fn from_bits(spec: GridSpec, bits: Vec<bool>) -> Self {
        let boundary = boundary_polylines(&spec, &bits);
        RegionMask { spec, bits, boundary, anchor: None }
    }

    /// Point at which cell `idx` was classified.
    pub fn sample_point(&self, idx: usize) -> Vec2 {
        match self.anchor {
            Some((i, p)) if i == idx => p,
            _ => self.spec.point(idx),
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.spec.cell_area()
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.bits.len() as f64
    }

    pub fn contains_point(&self, p: Vec2) -> bool {
        if !self.spec.region.contains(p) {
            return false;
        }
        let (ix, iy) = self.spec.locate(p);
        self.bits[self.spec.index(ix, iy)]
    }

    fn neighbours(&self, idx: usize, diag: bool) -> impl Iterator<Item = usize> + '_ {
        let (ix, iy) = self.spec.coords(idx);
        let (nx, ny) = (self.spec.nx as i64, self.spec.ny as i64);
        let offs: &[(i64, i64)] = if diag {
            &[(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]
        } else {
            &[(0, -1), (-1, 0), (1, 0), (0, 1)]
        };
        offs.iter().filter_map(move |&(dx, dy)| {
            let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
            (jx >= 0 && jy >= 0 && jx < nx && jy < ny).then(|| self.spec.index(jx as usize, jy as usize))
        })
    }

    /// True cells with a 4-neighbour that is false.
    pub fn boundary_cells(&self) -> Vec<usize> {
        (0..self.bits.len())
            .filter(|&i| self.bits[i] && self.neighbours(i, false).any(|j| !self.bits[j]))
            .collect()
    }

    /// Whether some 8-neighbour of `idx` has the opposite membership.
    pub fn near_transition(&self, idx: usize) -> bool {
        let b = self.bits[idx];
        self.neighbours(idx, true).any(|j| self.bits[j] != b)
    }

    /// Whether any 8-neighbour of `idx` (or the cell itself) is true.
    pub fn touches(&self, idx: usize) -> bool {
        self.bits[idx] || self.neighbours(idx, true).any(|j| self.bits[j])
    }
}

/// Aliasing-free region over the scene grid using all sampling axes of the array.
pub fn afr(array: &ArrayGeometry, scene: &Scene) -> Result<RegionMask> {
    let n = array.sample_axes()?.len();
    afr_axes(array, scene, &(0..n).collect::<Vec<_>>())
}

/// AFR restricted to the listed sampling-axis indices.
pub fn afr_axes(array: &ArrayGeometry, scene: &Scene, axes: &[usize]) -> Result<RegionMask> {
    scene.validate_for(array)?;
    let all = array.sample_axes()?;
    let mut chosen = Vec::with_capacity(axes.len());
    for &i in axes {
        let (a, d) = *all
            .get(i)
            .ok_or_else(|| NfalError::InvalidArgument(format!("array has no sampling axis {i}")))?;
        chosen.push((a, TAU / d));
    }
    let field = MatchedField::with_axes(array, scene.source, scene.k(), chosen)?;
    Ok(mask_from_field(&field, scene.grid(), scene.source))
}

/// Cells are classified at their centres, except the cell holding the source,
/// which is classified at the source itself so the mask always contains it.
pub(crate) fn mask_from_field(field: &MatchedField, spec: GridSpec, source: Vec2) -> RegionMask {
    let anchor = spec.region.contains(source).then(|| {
        let (ix, iy) = spec.locate(source);
        (spec.index(ix, iy), source)
    });
    let bits = map_range(spec.len(), |i| match anchor {
        Some((a, p)) if a == i => field.allowed(p),
        _ => field.allowed(spec.point(i)),
    });
    RegionMask { anchor, ..RegionMask::from_bits(spec, bits) }
}

/// A point on the continuous AFR boundary, located between two adjacent cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub point: Vec2,
    pub axis: usize,
    pub inside: usize,
    pub outside: usize,
}

/// Bisect the aliasing margin along every edge joining a true cell to a false one.
pub fn boundary_points(field: &MatchedField, mask: &RegionMask) -> Vec<BoundaryPoint> {
    let spec = mask.spec;
    let mut pairs = Vec::new();
    for iy in 0..spec.ny {
        for ix in 0..spec.nx {
            let a = spec.index(ix, iy);
            if ix + 1 < spec.nx {
                pairs.push((a, spec.index(ix + 1, iy)));
            }
            if iy + 1 < spec.ny {
                pairs.push((a, spec.index(ix, iy + 1)));
            }
        }
    }
    pairs.retain(|&(a, b)| mask.bits[a] != mask.bits[b]);
    let found = map_range(pairs.len(), |e| {
        let (a, b) = pairs[e];
        let (inside, outside) = if mask.bits[a] { (a, b) } else { (b, a) };
        let (pi, po) = (mask.sample_point(inside), mask.sample_point(outside));
        let f = |t: f64| field.margin(pi + (po - pi) * t);
        let (f0, f1) = (f(0.0), f(1.0));
        if !(f0 <= 0.0 && f1 > 0.0) {
            return None;
        }
        let t = bisect(&f, 0.0, 1.0, f0, 1e-9);
        let point = pi + (po - pi) * t;
        field.active_axis(point).map(|axis| BoundaryPoint { point, axis, inside, outside })
    });
    found.into_iter().flatten().collect()
}
