use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{NfalError, Result};
use crate::grid::Rect;

/// Minimum separation between two antennas of the same array (λ).
pub const COINCIDENCE_TOL: f64 = 1e-9;
/// Minimum source-to-antenna distance (λ).
pub const SINGULARITY_GUARD: f64 = 1e-6;
/// Relative tolerance used to validate uniform spacings.
pub const SPACING_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Polar coordinates `(r, θ)` with θ in (−π, π]. The origin maps to (0, 0).
pub fn to_polar(p: Vec2) -> (f64, f64) {
    let r = p.norm();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let mut t = p.y.atan2(p.x);
    if t == -PI {
        t = PI;
    }
    (r, t)
}

pub fn from_polar(r: f64, theta: f64) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(r * c, r * s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordSystem {
    Cartesian,
    Polar,
}

/// One uniformly sampled Cartesian direction of an array.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeAxis {
    pub dir: Vec2,
    pub spacing: f64,
    pub aperture: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarLayout {
    pub center: Vec2,
    pub radii: Vec<f64>,
    /// Radial step; `None` for a single ring.
    pub dr: Option<f64>,
    /// Angular step in radians; `None` for a single element per ring.
    pub dtheta: Option<f64>,
    pub start_angle: f64,
    pub arc: f64,
    pub n_theta: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sampling {
    Lattice(Vec<LatticeAxis>),
    Polar(PolarLayout),
    Irregular,
}

/// A sampling axis along which the aliasing condition is tested.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleAxis {
    /// Cartesian component along a unit direction.
    Dir(Vec2),
    /// Radial polar component about `center`.
    Radial { center: Vec2 },
    /// Angular polar component about `center` (includes the r_z factor).
    Angular { center: Vec2 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrayGeometry {
    elements: Vec<Vec2>,
    sampling: Sampling,
    /// Unwrapped `(r, θ)` per element for polar arrays.
    polar: Option<Vec<(f64, f64)>>,
}

fn invalid(msg: impl Into<String>) -> NfalError {
    NfalError::InvalidArgument(msg.into())
}

fn check_point(p: Vec2) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("non-finite coordinate {p:?}")))
    }
}

/// Offsets `(2i − (n−1))·Δ/2`, exactly antisymmetric about zero.
fn centered_offsets(n: usize, spacing: f64) -> impl Iterator<Item = f64> {
    let half = spacing / 2.0;
    (0..n).map(move |i| (2.0 * i as f64 - (n as f64 - 1.0)) * half)
}

fn check_distinct(elements: &[Vec2]) -> Result<()> {
    // Sort by x so only neighbours within the tolerance band need comparing.
    let mut idx: Vec<usize> = (0..elements.len()).collect();
    idx.sort_by(|&a, &b| elements[a].x.total_cmp(&elements[b].x));
    for (n, &i) in idx.iter().enumerate() {
        for &j in &idx[n + 1..] {
            if elements[j].x - elements[i].x > COINCIDENCE_TOL {
                break;
            }
            if (elements[j] - elements[i]).norm() <= COINCIDENCE_TOL {
                return Err(invalid(format!(
                    "antennas {i} and {j} coincide at {:?}",
                    elements[i]
                )));
            }
        }
    }
    Ok(())
}

impl ArrayGeometry {
    /// Arbitrary point set. AFR operations refuse such arrays.
    pub fn from_points(points: Vec<Vec2>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("array must contain at least one antenna"));
        }
        for &p in &points {
            check_point(p)?;
        }
        check_distinct(&points)?;
        Ok(ArrayGeometry { elements: points, sampling: Sampling::Irregular, polar: None })
    }

    pub fn build_linear(n: usize, aperture: f64, center: Vec2, axis: Vec2) -> Result<Self> {
        if n == 0 {
            return Err(invalid("linear array needs n >= 1"));
        }
        check_point(center)?;
        if !(aperture >= 0.0) || !aperture.is_finite() {
            return Err(invalid(format!("aperture must be finite and >= 0, got {aperture}")));
        }
        if n > 1 && aperture == 0.0 {
            return Err(invalid("zero aperture requires n = 1"));
        }
        let len = axis.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(invalid("axis must be a non-zero finite vector"));
        }
        let u = axis * (1.0 / len);
        let mut axes = Vec::new();
        let spacing = if n > 1 { aperture / (n as f64 - 1.0) } else { 0.0 };
        if n > 1 {
            axes.push(LatticeAxis { dir: u, spacing, aperture });
        }
        let elements = centered_offsets(n, spacing).map(|t| center + u * t).collect();
        Ok(ArrayGeometry { elements, sampling: Sampling::Lattice(axes), polar: None })
    }

    /// Row-major lattice: element `(ix, iy)` has index `iy·nx + ix`.
    pub fn build_rectangular(nx: usize, ny: usize, dx: f64, dy: f64, center: Vec2) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid("rectangular array needs nx, ny >= 1"));
        }
        check_point(center)?;
        for (n, d, name) in [(nx, dx, "Dx"), (ny, dy, "Dy")] {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(invalid(format!("{name} must be finite and >= 0")));
            }
            if n > 1 && d == 0.0 {
                return Err(invalid(format!("{name} = 0 requires a single antenna on that axis")));
            }
        }
        let sx = if nx > 1 { dx / (nx as f64 - 1.0) } else { 0.0 };
        let sy = if ny > 1 { dy / (ny as f64 - 1.0) } else { 0.0 };
        let xs: Vec<f64> = centered_offsets(nx, sx).collect();
        let ys: Vec<f64> = centered_offsets(ny, sy).collect();
        let mut elements = Vec::with_capacity(nx * ny);
        for &ty in &ys {
            for &tx in &xs {
                elements.push(Vec2::new(center.x + tx, center.y + ty));
            }
        }
        let mut axes = Vec::new();
        if nx > 1 {
            axes.push(LatticeAxis { dir: Vec2::new(1.0, 0.0), spacing: sx, aperture: dx });
        }
        if ny > 1 {
            axes.push(LatticeAxis { dir: Vec2::new(0.0, 1.0), spacing: sy, aperture: dy });
        }
        Ok(ArrayGeometry { elements, sampling: Sampling::Lattice(axes), polar: None })
    }

    pub fn build_circular(
        n_theta: usize,
        arc: f64,
        radius: f64,
        center: Vec2,
        start_angle: f64,
    ) -> Result<Self> {
        Self::build_concentric(n_theta, arc, &[radius], center, start_angle)
    }

    /// Ring-major concatenation of circular arrays sharing angular sampling.
    pub fn build_concentric(
        n_theta: usize,
        arc: f64,
        radii: &[f64],
        center: Vec2,
        start_angle: f64,
    ) -> Result<Self> {
        if n_theta == 0 {
            return Err(invalid("circular array needs n_theta >= 1"));
        }
        check_point(center)?;
        if !start_angle.is_finite() {
            return Err(invalid("start angle must be finite"));
        }
        if !(arc > 0.0 && arc <= TAU * (1.0 + 1e-12)) {
            return Err(invalid(format!("arc must lie in (0, 2π], got {arc}")));
        }
        if radii.is_empty() {
            return Err(invalid("at least one radius is required"));
        }
        for &r in radii {
            if !(r > 0.0) || !r.is_finite() {
                return Err(invalid(format!("radius must be positive and finite, got {r}")));
            }
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("radii must be strictly increasing"));
        }
        let dr = if radii.len() > 1 {
            let step = (radii[radii.len() - 1] - radii[0]) / (radii.len() as f64 - 1.0);
            if radii.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > SPACING_TOL * step.max(1.0)) {
                return Err(invalid("radial steps must be uniform"));
            }
            Some(step)
        } else {
            None
        };
        let full = (arc - TAU).abs() <= 1e-12 * TAU;
        let dtheta = if full {
            Some(TAU / n_theta as f64)
        } else if n_theta > 1 {
            Some(arc / (n_theta as f64 - 1.0))
        } else {
            None
        };
        let step = dtheta.unwrap_or(0.0);
        let mut elements = Vec::with_capacity(radii.len() * n_theta);
        let mut polar = Vec::with_capacity(radii.len() * n_theta);
        for &r in radii {
            for j in 0..n_theta {
                let theta = start_angle + j as f64 * step;
                elements.push(center + from_polar(r, theta));
                polar.push((r, theta));
            }
        }
        check_distinct(&elements)?;
        let layout = PolarLayout {
            center,
            radii: radii.to_vec(),
            dr,
            dtheta,
            start_angle,
            arc: if full { TAU } else { arc },
            n_theta,
        };
        Ok(ArrayGeometry { elements, sampling: Sampling::Polar(layout), polar: Some(polar) })
    }

    pub fn elements(&self) -> &[Vec2] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sampling(&self) -> &Sampling {
        &self.sampling
    }

    pub fn coord_system(&self) -> CoordSystem {
        match self.sampling {
            Sampling::Polar(_) => CoordSystem::Polar,
            _ => CoordSystem::Cartesian,
        }
    }

    /// Unwrapped `(r, θ)` per element, relative to the layout centre.
    pub fn polar_coords(&self) -> Option<&[(f64, f64)]> {
        self.polar.as_deref()
    }

    pub fn polar_layout(&self) -> Option<&PolarLayout> {
        match &self.sampling {
            Sampling::Polar(p) => Some(p),
            _ => None,
        }
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.elements.len() as f64;
        let s = self.elements.iter().fold(Vec2::ZERO, |a, &p| a + p);
        s * (1.0 / n)
    }

    /// Sampling axes with their spacings, in the order the aliasing test uses.
    ///
    /// Polar arrays expose θ and, with more than one ring, r.
    pub fn sample_axes(&self) -> Result<Vec<(SampleAxis, f64)>> {
        match &self.sampling {
            Sampling::Lattice(axes) => Ok(axes.iter().map(|a| (SampleAxis::Dir(a.dir), a.spacing)).collect()),
            Sampling::Polar(p) => {
                let mut out = Vec::new();
                if let Some(dr) = p.dr {
                    out.push((SampleAxis::Radial { center: p.center }, dr));
                }
                if let Some(dt) = p.dtheta {
                    out.push((SampleAxis::Angular { center: p.center }, dt));
                }
                Ok(out)
            }
            Sampling::Irregular => Err(NfalError::UnsupportedGeometry(
                "array has no uniform spacing; the aliasing condition needs uniform Δ_i".into(),
            )),
        }
    }

    /// Per-axis aperture extents: projected lengths for lattices, `(radial thickness, arc)` for polar.
    pub fn extents(&self) -> Vec<f64> {
        match &self.sampling {
            Sampling::Lattice(axes) => axes.iter().map(|a| a.aperture).collect(),
            Sampling::Polar(p) => vec![p.radii[p.radii.len() - 1] - p.radii[0], p.arc],
            Sampling::Irregular => {
                let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
                for p in &self.elements {
                    x0 = x0.min(p.x);
                    x1 = x1.max(p.x);
                    y0 = y0.min(p.y);
                    y1 = y1.max(p.y);
                }
                vec![x1 - x0, y1 - y0]
            }
        }
    }

    /// Sub-array keeping the listed indices, preserving the sampling metadata.
    ///
    /// Callers are responsible for the kept set still being a sub-lattice with the
    /// original spacing (true for any subset of a uniform array's sites).
    pub fn subset(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(invalid("subset must keep at least one antenna"));
        }
        let mut elements = Vec::with_capacity(keep.len());
        let mut polar = self.polar.as_ref().map(|_| Vec::with_capacity(keep.len()));
        for &i in keep {
            let p = *self
                .elements
                .get(i)
                .ok_or_else(|| invalid(format!("index {i} out of range")))?;
            elements.push(p);
            if let (Some(dst), Some(src)) = (polar.as_mut(), self.polar.as_ref()) {
                dst.push(src[i]);
            }
        }
        check_distinct(&elements)?;
        Ok(ArrayGeometry { elements, sampling: self.sampling.clone(), polar })
    }

    /// Union with extra sites on the same lattice. Sites must not duplicate existing ones.
    pub fn with_extra(&self, extra: &[Vec2]) -> Result<Self> {
        let mut elements = self.elements.clone();
        for &p in extra {
            check_point(p)?;
            elements.push(p);
        }
        check_distinct(&elements)?;
        let polar = match (&self.polar, &self.sampling) {
            (Some(src), Sampling::Polar(l)) => {
                let mut v = src.clone();
                v.extend(extra.iter().map(|&p| to_polar(p - l.center)));
                Some(v)
            }
            _ => None,
        };
        Ok(ArrayGeometry { elements, sampling: self.sampling.clone(), polar })
    }

    /// Every element of `self` matches some element of `other` within the coincidence tolerance.
    pub fn is_subset_of(&self, other: &ArrayGeometry) -> bool {
        self.elements
            .iter()
            .all(|p| other.elements.iter().any(|q| (*p - *q).norm() <= COINCIDENCE_TOL))
    }

    /// Distance to the nearest antenna.
    pub fn min_distance_to(&self, p: Vec2) -> f64 {
        self.elements.iter().map(|&z| (z - p).norm()).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub wavelength: f64,
    pub source: Vec2,
    pub region: Rect,
    pub grid_shape: (usize, usize),
}

impl Scene {
    pub fn new(source: Vec2, region: Rect, grid_shape: (usize, usize)) -> Result<Self> {
        let s = Scene { wavelength: 1.0, source, region, grid_shape };
        s.validate()?;
        Ok(s)
    }

    pub fn k(&self) -> f64 {
        TAU / self.wavelength
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) || !self.wavelength.is_finite() {
            return Err(invalid("wavelength must be positive"));
        }
        check_point(self.source)?;
        self.region.validate()?;
        if self.grid_shape.0 == 0 || self.grid_shape.1 == 0 {
            return Err(invalid("grid shape must be positive"));
        }
        Ok(())
    }

    /// Scene validity against a particular array (source away from every antenna).
    pub fn validate_for(&self, array: &ArrayGeometry) -> Result<()> {
        self.validate()?;
        for &z in array.elements() {
            if (z - self.source).norm() <= SINGULARITY_GUARD {
                return Err(NfalError::Singularity { a: z.to_array(), b: self.source.to_array() });
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> crate::grid::GridSpec {
        crate::grid::GridSpec { region: self.region, nx: self.grid_shape.0, ny: self.grid_shape.1 }
    }
}
