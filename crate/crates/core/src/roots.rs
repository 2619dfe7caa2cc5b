//! Bracketing root finder: dense sign scan followed by bisection.

use crate::exec::map_range;

/// Default number of scan samples.
pub const DEFAULT_SCAN: usize = 4096;

/// All sign-change roots of `f` on `[a, b]`, refined until the bracket is below `tol`.
///
/// Samples that are exactly zero are returned as roots. Roots come back sorted.
pub fn find_roots<F>(f: F, a: f64, b: f64, samples: usize, tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let n = samples.max(2);
    let step = (b - a) / (n as f64 - 1.0);
    let xs: Vec<f64> = (0..n).map(|i| if i + 1 == n { b } else { a + i as f64 * step }).collect();
    let fs = map_range(n, |i| f(xs[i]));
    let mut roots = Vec::new();
    for i in 0..n {
        if fs[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i + 1 < n && fs[i + 1] != 0.0 && fs[i].is_finite() && fs[i + 1].is_finite() && (fs[i] < 0.0) != (fs[i + 1] < 0.0) {
            roots.push(bisect(&f, xs[i], xs[i + 1], fs[i], tol));
        }
    }
    roots
}

/// Bisection on a bracket with `f(lo) = flo` of opposite sign to `f(hi)`.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
