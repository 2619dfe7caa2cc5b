/// Array family for the safe-spacing bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArrayKind {
    Cartesian,
    /// Circular array of radius `radius`; the bound holds for sources and test points with r ≤ radius.
    Circular { radius: f64 },
}

/// Spacing that guarantees an all-true AFR: λ/2 per Cartesian axis, λ/(2R) radians for circular arrays.
pub fn safe_spacing(kind: ArrayKind, wavelength: f64) -> f64 {
    match kind {
        ArrayKind::Cartesian => wavelength / 2.0,
        ArrayKind::Circular { radius } => wavelength / (2.0 * radius),
    }
}
