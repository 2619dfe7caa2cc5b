//! Loci of critical antennas: the second-order expansion for linear arrays, its
//! asymptotes, numerical extremum loci and the far-field reductions.

use std::f64::consts::TAU;

use crate::error::{NfalError, Result};
use crate::field::{k_g, phase_second_derivative, DerivAxis};
use crate::geometry::{from_polar, to_polar, Vec2};
use crate::roots::{find_roots, DEFAULT_SCAN};

/// Conic `a x² + b x A + c A² + d x + e A + f = 0` with `A = y − y_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConicCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    /// `y_s − ỹ_s`.
    pub eps: f64,
    /// `y_s`, used to map `A` back to scene coordinates.
    pub y_s: f64,
}

impl ConicCoefficients {
    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }

    /// Conic value at scene point `(x, y)`.
    pub fn eval(&self, p: Vec2) -> f64 {
        let (x, a) = (p.x, p.y - self.y_s);
        self.a * x * x + self.b * x * a + self.c * a * a + self.d * x + self.e * a + self.f
    }

    /// `|Q(x, A)|` divided by the sum of the absolute values of its terms.
    pub fn relative_residual(&self, p: Vec2) -> f64 {
        let (x, a) = (p.x, p.y - self.y_s);
        let terms = [
            self.a * x * x,
            self.b * x * a,
            self.c * a * a,
            self.d * x,
            self.e * a,
            self.f,
        ];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let q: f64 = terms.iter().sum();
        if scale == 0.0 {
            0.0
        } else {
            q.abs() / scale
        }
    }
}

/// Expansion coefficients for a linear array along x.
///
/// `e` is taken as `2u0u1 − u3`, the value consistent with expanding
/// `(x − A u1 − u0)² − A² u2 − A u3`; see the design notes in the docs.
pub fn hyperbola_coefficients(x_tilde: Vec2, x_s: Vec2) -> Result<ConicCoefficients> {
    let eps = x_s.y - x_tilde.y;
    if eps == 0.0 || !eps.is_finite() {
        return Err(NfalError::DegenerateExpansion);
    }
    let dx = x_tilde.x - x_s.x;
    let u1 = -0.75 * dx / eps;
    let u0 = x_s.x;
    let u2 = 9.0 / 16.0 * dx * dx / (eps * eps) + 0.5;
    let u3 = (x_s.x * x_s.x - x_tilde.x * x_tilde.x - eps * eps) / (-4.0 * eps / 3.0) - 1.5 * x_s.x * dx / eps;
    Ok(ConicCoefficients {
        a: 1.0,
        b: -2.0 * u1,
        c: u1 * u1 - u2,
        d: -2.0 * u0,
        e: 2.0 * u0 * u1 - u3,
        f: u0 * u0,
        u0,
        u1,
        u2,
        u3,
        eps,
        y_s: x_s.y,
    })
}

/// Line `A = m x + p` in the expansion frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoteLine {
    pub m: f64,
    pub p: f64,
    pub y_s: f64,
}

impl AsymptoteLine {
    /// Perpendicular distance from scene point `q`.
    pub fn distance(&self, q: Vec2) -> f64 {
        let a = q.y - self.y_s;
        (a - self.m * q.x - self.p).abs() / (1.0 + self.m * self.m).sqrt()
    }

    /// Scene-coordinate point at abscissa `x`.
    pub fn at(&self, x: f64) -> Vec2 {
        Vec2::new(x, self.y_s + self.m * x + self.p)
    }
}

pub fn asymptotes(c: &ConicCoefficients) -> Result<(AsymptoteLine, AsymptoteLine)> {
    let disc = c.discriminant();
    if !(disc > 0.0) {
        return Err(NfalError::InvalidArgument(format!("discriminant {disc} is not positive")));
    }
    let line = |sign: f64| -> Result<AsymptoteLine> {
        let m = (-c.b + sign * disc.sqrt()) / (2.0 * c.c);
        let den = c.b + 2.0 * c.c * m;
        if den == 0.0 {
            return Err(NfalError::InvalidArgument("vertical asymptote (b + 2cm = 0)".into()));
        }
        Ok(AsymptoteLine { m, p: -(c.e * m + c.d) / den, y_s: c.y_s })
    };
    Ok((line(1.0)?, line(-1.0)?))
}

/// Curve along which extremum loci are searched.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SamplingCurve {
    Segment { from: Vec2, to: Vec2 },
    /// Arc about `center` from `theta0` to `theta1` (radians).
    Arc { center: Vec2, radius: f64, theta0: f64, theta1: f64 },
}

impl SamplingCurve {
    fn point(&self, t: f64) -> Vec2 {
        match *self {
            SamplingCurve::Segment { from, to } => from + (to - from) * t,
            SamplingCurve::Arc { center, radius, theta0, theta1 } => {
                center + from_polar(radius, theta0 + (theta1 - theta0) * t)
            }
        }
    }

    /// Parameter tolerance giving the requested position (λ) or angle (rad) accuracy.
    fn param_tol(&self, tol: f64) -> f64 {
        match *self {
            SamplingCurve::Segment { from, to } => tol / (to - from).norm().max(f64::MIN_POSITIVE),
            SamplingCurve::Arc { theta0, theta1, .. } => tol / (theta1 - theta0).abs().max(f64::MIN_POSITIVE),
        }
    }

    fn origin(&self) -> Vec2 {
        match *self {
            SamplingCurve::Segment { .. } => Vec2::ZERO,
            SamplingCurve::Arc { center, .. } => center,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LociResult {
    pub roots: Vec<Vec2>,
    /// `x̃_s = x_s`: the second derivative vanishes identically.
    pub degenerate: bool,
}

/// Roots of `∂²φ_g/∂z_i²` along a curve by scan and bisection.
///
/// Polar axes are taken about the arc centre (the origin for segments).
pub fn exact_loci(
    x_tilde: Vec2,
    x_s: Vec2,
    k: f64,
    axis: DerivAxis,
    curve: SamplingCurve,
    samples: Option<usize>,
) -> Result<LociResult> {
    if x_tilde == x_s {
        return Ok(LociResult { roots: Vec::new(), degenerate: true });
    }
    let o = curve.origin();
    let (xt, xs) = (x_tilde - o, x_s - o);
    let f = |t: f64| {
        let z = curve.point(t) - o;
        phase_second_derivative(z, xt, xs, k, axis).unwrap_or(f64::NAN)
    };
    let ts = find_roots(f, 0.0, 1.0, samples.unwrap_or(DEFAULT_SCAN), curve.param_tol(1e-10));
    Ok(LociResult { roots: ts.into_iter().map(|t| curve.point(t)).collect(), degenerate: false })
}

/// Far-field approximation of `k_g` and its observed error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FfApprox {
    pub value: Vec2,
    /// `max(‖z‖/D, ‖z‖/D̃)`.
    pub rho: f64,
    /// `‖approx − exact‖`.
    pub error: f64,
    /// `error / (k ρ)`.
    pub constant: f64,
}

/// `k(s − s̃)` with `s`, `s̃` the unit directions of the source and test point.
pub fn ff_kg_approx(z: Vec2, x_tilde: Vec2, x_s: Vec2, k: f64) -> Result<FfApprox> {
    let (ds, dt) = (x_s.norm(), x_tilde.norm());
    if !(ds > 0.0 && dt > 0.0) {
        return Err(NfalError::InvalidArgument("directions undefined at the origin".into()));
    }
    let value = (x_s * (1.0 / ds) - x_tilde * (1.0 / dt)) * k;
    let exact = k_g(z, x_tilde, x_s, k)?;
    let rho = (z.norm() / ds).max(z.norm() / dt);
    let error = (value - exact).norm();
    let constant = if rho > 0.0 { error / (k * rho) } else { 0.0 };
    Ok(FfApprox { value, rho, error, constant })
}

/// Far-field phase `k r_ss cos(θ_z − θ_ss)` with `x_ss = x_s − x̃_s`, plus the validity ratio
/// `max(‖x_s‖, ‖x̃_s‖)/r_z`.
pub fn ff_phi_circular(z_polar: (f64, f64), x_tilde: Vec2, x_s: Vec2, k: f64) -> (f64, f64) {
    let (rss, tss) = to_polar(x_s - x_tilde);
    let ratio = x_s.norm().max(x_tilde.norm()) / z_polar.0;
    (k * rss * (z_polar.1 - tss).cos(), ratio)
}

/// Far-field angular roots `θ_ss + π/2 + nπ` in `[0, 2π)`.
pub fn ff_circular_roots(x_tilde: Vec2, x_s: Vec2) -> [f64; 2] {
    let (_, tss) = to_polar(x_s - x_tilde);
    let a = (tss + TAU / 4.0).rem_euclid(TAU);
    let b = (a + TAU / 2.0).rem_euclid(TAU);
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}
