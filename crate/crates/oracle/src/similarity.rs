//! Similarity error by nested one-dimensional minimization: for a trial
//! scale the best translation is found per axis by bisection on the
//! derivative, and the scale itself by grid bracketing then bisection on the
//! derivative of the translation-optimal residual.

use swarmform_core::Vec3;

fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    // g increasing, g(lo) <= 0 <= g(hi).
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Translation along `axis` minimizing the residual for scale `sigma`.
fn best_translation(points: &[Vec3], shape: &[Vec3], sigma: f64, axis: usize) -> f64 {
    let residuals: Vec<f64> = points.iter().zip(shape).map(|(p, d)| p[axis] - sigma * d[axis]).collect();
    let bound = residuals.iter().fold(1.0f64, |m, r| m.max(r.abs())) * 2.0;
    // Derivative of sum (r - t)^2 in t, halved.
    bisect(-bound, bound, |t| residuals.iter().map(|r| t - r).sum())
}

fn residual_and_slope(points: &[Vec3], shape: &[Vec3], sigma: f64) -> (f64, f64) {
    let t: Vec<f64> = (0..3).map(|k| best_translation(points, shape, sigma, k)).collect();
    let mut r = 0.0;
    let mut slope = 0.0;
    for (p, d) in points.iter().zip(shape) {
        for k in 0..3 {
            let e = p[k] - sigma * d[k] - t[k];
            r += e * e;
            slope -= 2.0 * e * d[k];
        }
    }
    (r, slope)
}

/// `None` for a degenerate shape; infinity when the best scale is not
/// positive.
pub fn nested_similarity(points: &[Vec3], shape: &[Vec3]) -> Option<f64> {
    let n = shape.len();
    let spread: f64 = shape.iter().map(|d| (d - shape[0]).norm()).sum();
    if n < 2 || spread == 0.0 {
        return None;
    }
    let slope = |s: f64| residual_and_slope(points, shape, s).1;
    if slope(0.0) >= 0.0 {
        return Some(f64::INFINITY);
    }
    // Grid bracket, doubling until the slope turns positive.
    let mut hi = 1.0;
    while slope(hi) <= 0.0 {
        hi *= 2.0;
    }
    let grid: Vec<f64> = (0..=64).map(|k| hi * k as f64 / 64.0).collect();
    let upper = grid.iter().position(|&s| slope(s) > 0.0).unwrap();
    let sigma = bisect(grid[upper - 1], grid[upper], slope);
    let (r, _) = residual_and_slope(points, shape, sigma);
    Some(r / (n as f64 * sigma * sigma))
}
