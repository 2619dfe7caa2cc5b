use num_complex::Complex64;

use crate::error::{NfalError, Result};
use crate::geometry::{from_polar, to_polar, Vec2, SINGULARITY_GUARD};

/// Distance with the singularity guard applied.
pub fn guarded_distance(z: Vec2, x: Vec2) -> Result<f64> {
    let d = (x - z).norm();
    if d > SINGULARITY_GUARD {
        Ok(d)
    } else {
        Err(NfalError::Singularity { a: z.to_array(), b: x.to_array() })
    }
}

/// `exp(−j·k‖x−z‖)/‖x−z‖`.
pub fn channel(z: Vec2, x: Vec2, k: f64) -> Result<Complex64> {
    let d = guarded_distance(z, x)?;
    Ok(Complex64::from_polar(1.0 / d, -k * d))
}

/// `h(z, x_s)·conj(h(z, x̃_s))`.
pub fn matched_product(z: Vec2, x_tilde: Vec2, x_s: Vec2, k: f64) -> Result<Complex64> {
    let ds = guarded_distance(z, x_s)?;
    let dt = guarded_distance(z, x_tilde)?;
    Ok(Complex64::from_polar(1.0 / (ds * dt), -k * (ds - dt)))
}

pub fn phase_h(z: Vec2, x_s: Vec2, k: f64) -> Result<f64> {
    Ok(-k * guarded_distance(z, x_s)?)
}

pub fn phase_g(z: Vec2, x_tilde: Vec2, x_s: Vec2, k: f64) -> Result<f64> {
    Ok(-k * (guarded_distance(z, x_s)? - guarded_distance(z, x_tilde)?))
}

/// Local spatial frequency of the received field; points from the antenna toward the source.
pub fn k_h(z: Vec2, x_s: Vec2, k: f64) -> Result<Vec2> {
    let d = guarded_distance(z, x_s)?;
    Ok((x_s - z) * (k / d))
}

/// Local spatial frequency of the matched product.
pub fn k_g(z: Vec2, x_tilde: Vec2, x_s: Vec2, k: f64) -> Result<Vec2> {
    Ok(k_h(z, x_s, k)? - k_h(z, x_tilde, k)?)
}

/// Wavevector in polar coordinates. `ktheta` is the derivative with respect to θ_z,
/// so it carries the r_z factor; `tangential()` gives the Cartesian-equivalent component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarWaveVector {
    pub kr: f64,
    pub ktheta: f64,
    pub r_z: f64,
}

impl PolarWaveVector {
    pub fn tangential(&self) -> f64 {
        if self.r_z == 0.0 {
            0.0
        } else {
            self.ktheta / self.r_z
        }
    }
}

fn polar_terms(r_z: f64, theta_z: f64, x: Vec2, k: f64) -> Result<(f64, f64)> {
    // Gradient of −k‖x − z‖ in (r_z, θ_z).
    let z = from_polar(r_z, theta_z);
    let d = guarded_distance(z, x)?;
    let (r, t) = to_polar(x);
    let dth = theta_z - t;
    let kr = -k * (r_z - r * dth.cos()) / d;
    let kt = -k * r_z * r * dth.sin() / d;
    Ok((kr, kt))
}

/// Polar components of `k_h` at the antenna `(r_z, θ_z)`.
pub fn k_h_polar_at(r_z: f64, theta_z: f64, x_s: Vec2, k: f64) -> Result<PolarWaveVector> {
    let (kr, ktheta) = polar_terms(r_z, theta_z, x_s, k)?;
    Ok(PolarWaveVector { kr, ktheta, r_z })
}

/// Polar components of `k_g` at the antenna `(r_z, θ_z)`; θ_z may be unwrapped.
pub fn k_g_polar_at(r_z: f64, theta_z: f64, x_tilde: Vec2, x_s: Vec2, k: f64) -> Result<PolarWaveVector> {
    let (rs, ts) = polar_terms(r_z, theta_z, x_s, k)?;
    let (rt, tt) = polar_terms(r_z, theta_z, x_tilde, k)?;
    Ok(PolarWaveVector { kr: rs - rt, ktheta: ts - tt, r_z })
}

/// Polar `k_g` with all points given in Cartesian coordinates about the polar origin.
pub fn k_g_polar(z: Vec2, x_tilde: Vec2, x_s: Vec2, k: f64) -> Result<PolarWaveVector> {
    let (r_z, theta_z) = to_polar(z);
    k_g_polar_at(r_z, theta_z, x_tilde, x_s, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivAxis {
    X,
    Y,
    /// Radial coordinate about the origin.
    R,
    /// Angular coordinate about the origin.
    Theta,
}

/// Second derivative of `‖x − z‖` with respect to one coordinate of `z`.
fn dist_second(z: Vec2, x: Vec2, axis: DerivAxis) -> Result<f64> {
    let d = guarded_distance(z, x)?;
    let d3 = d * d * d;
    Ok(match axis {
        DerivAxis::X => (z.y - x.y).powi(2) / d3,
        DerivAxis::Y => (z.x - x.x).powi(2) / d3,
        DerivAxis::R | DerivAxis::Theta => {
            let (rz, tz) = to_polar(z);
            let (rx, tx) = to_polar(x);
            let (s, c) = (tz - tx).sin_cos();
            if axis == DerivAxis::R {
                (rx * s).powi(2) / d3
            } else {
                let p = rz * rx;
                p * c / d - (p * s).powi(2) / d3
            }
        }
    })
}

/// Analytic `∂²φ_g/∂z_i²` with `φ_g = −k(‖x_s − z‖ − ‖x̃_s − z‖)`.
pub fn phase_second_derivative(z: Vec2, x_tilde: Vec2, x_s: Vec2, k: f64, axis: DerivAxis) -> Result<f64> {
    Ok(-k * dist_second(z, x_s, axis)? + k * dist_second(z, x_tilde, axis)?)
}
