use crate::Vec3;

use super::SimError;

/// Formation similarity error: the least-squares residual of fitting
/// `sigma * shape + t` to `positions`, divided by `N * sigma^2`.
///
/// `positions[k]` is compared with `shape[k]`, so callers order positions by
/// slot. Translation and scale are the closed-form optimizers on centered
/// coordinates. A fit with non-positive scale returns infinity (the positions
/// are mirrored or collapsed relative to the shape).
pub fn formation_similarity(positions: &[Vec3], shape: &[Vec3]) -> Result<f64, SimError> {
    let n = shape.len();
    if n < 2 || positions.len() != n {
        return Err(SimError::Similarity(format!(
            "need at least two matching points, got {} positions for {} slots",
            positions.len(),
            n
        )));
    }
    let mean = |pts: &[Vec3]| pts.iter().sum::<Vec3>() / n as f64;
    let (pc, dc) = (mean(positions), mean(shape));

    let mut cross = 0.0;
    let mut shape_sq = 0.0;
    for (p, d) in positions.iter().zip(shape) {
        let (p, d) = (p - pc, d - dc);
        cross += p.dot(&d);
        shape_sq += d.norm_squared();
    }
    if !(shape_sq > 0.0) {
        return Err(SimError::Similarity("degenerate shape".into()));
    }
    let sigma = cross / shape_sq;
    if !(sigma > 0.0) {
        return Ok(f64::INFINITY);
    }
    let residual: f64 = positions
        .iter()
        .zip(shape)
        .map(|(p, d)| ((p - pc) - sigma * (d - dc)).norm_squared())
        .sum();
    Ok(residual / (n as f64 * sigma * sigma))
}
