//! Safe flight corridor generation by iterative nearest-obstacle cutting.
//!
//! Start from the sensing box around the UAV (clipped to the world). While
//! some occupied cell may still reach into the polytope, take the nearest one
//! (center `o`) and add the halfspace whose normal points from the UAV to `o`.
//! The plane keeps `safety_margin - resolution / 2` of clearance from the
//! cell's box, which is exactly `safety_margin` from `o` for axis-aligned
//! normals. Near obstacles the plane is pulled back to halfway between the
//! UAV and `o` so the UAV stays interior.
//!
//! The result is convex, contains the UAV, and excludes every occupied cell
//! center in the box. When the UAV is at least `resolution * sqrt(3)` from
//! every occupied center it also excludes the whole cells.

use serde::{Deserialize, Serialize};

use crate::world::OccupancyGrid;
use crate::Vec3;

use super::{CorridorError, Polytope};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SfcParams {
    pub sensing_half_extent: f64,
    pub safety_margin: f64,
    /// Face budget including the six box faces.
    pub max_faces: usize,
    /// Sensing box shrink factor applied when the face budget runs out.
    pub shrink_factor: f64,
}

impl Default for SfcParams {
    fn default() -> Self {
        Self {
            sensing_half_extent: 5.0,
            safety_margin: 0.25,
            max_faces: 30,
            shrink_factor: 0.7,
        }
    }
}

impl SfcParams {
    pub fn validate(&self) -> Result<(), CorridorError> {
        if !(self.sensing_half_extent > 0.0)
            || !(self.safety_margin > 0.0)
            || self.max_faces < 7
            || !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0)
        {
            return Err(CorridorError::InvalidParams);
        }
        Ok(())
    }
}

pub fn generate_sfc(
    position: &Vec3,
    grid: &OccupancyGrid,
    params: &SfcParams,
) -> Result<Polytope, CorridorError> {
    params.validate()?;
    match grid.occupied_at(position) {
        None => return Err(CorridorError::OutOfBounds(*position)),
        Some(true) => return Err(CorridorError::Occupied(*position)),
        Some(false) => {}
    }

    let mut half = params.sensing_half_extent;
    loop {
        if let Some(poly) = cut_box(position, grid, half, params)? {
            return Ok(poly);
        }
        half *= params.shrink_factor;
    }
}

/// One attempt at a fixed box size; `None` when the face budget ran out.
fn cut_box(
    p: &Vec3,
    grid: &OccupancyGrid,
    half: f64,
    params: &SfcParams,
) -> Result<Option<Polytope>, CorridorError> {
    let wlo = grid.min_corner();
    let whi = grid.max_corner();
    let mut lo = Vec3::zeros();
    let mut hi = Vec3::zeros();
    for k in 0..3 {
        lo[k] = (p[k] - half).max(wlo[k]);
        hi[k] = (p[k] + half).min(whi[k]);
    }
    let mut poly = Polytope::from_box(lo, hi, *p)?;

    let half_cell = 0.5 * grid.resolution();
    let clearance = (params.safety_margin - half_cell).max(0.0);
    // Support of a cell box around its center along `n`.
    let support = |n: &Vec3| half_cell * (n.x.abs() + n.y.abs() + n.z.abs());

    // Cells centered just outside the box can still reach into it.
    let pad = Vec3::repeat(half_cell);
    let mut live = occupied_centers_in_box(grid, &(lo - pad), &(hi + pad));
    loop {
        // A cell stays live while its box meets every halfspace.
        live.retain(|o| {
            poly.normals()
                .iter()
                .zip(poly.offsets())
                .all(|(n, b)| n.dot(o) - support(n) <= *b)
        });
        if live.is_empty() {
            return Ok(Some(poly));
        }
        if poly.face_count() >= params.max_faces {
            return Ok(None);
        }
        // Nearest remaining obstacle; earliest in scan order on ties.
        let (idx, d2) = live
            .iter()
            .map(|o| (o - p).norm_squared())
            .enumerate()
            .fold((0, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best });
        let o = live.swap_remove(idx);
        let d = d2.sqrt();
        let n = (o - p) / d;
        let gap = (support(&n) + clearance).min(0.5 * d);
        poly.push_face(n, n.dot(&o) - gap);
    }
}

fn occupied_centers_in_box(grid: &OccupancyGrid, lo: &Vec3, hi: &Vec3) -> Vec<Vec3> {
    let r = grid.resolution();
    let o = grid.origin();
    let dims = grid.dims();
    let mut range = [(0usize, 0usize); 3];
    for k in 0..3 {
        let first = ((lo[k] - o[k]) / r - 0.5).ceil().max(0.0) as usize;
        let last = ((hi[k] - o[k]) / r - 0.5).floor();
        if last < 0.0 {
            return Vec::new();
        }
        range[k] = (first, (last as usize).min(dims[k] - 1));
    }
    let mut out = Vec::new();
    for ix in range[0].0..=range[0].1 {
        for iy in range[1].0..=range[1].1 {
            for iz in range[2].0..=range[2].1 {
                if grid.is_occupied(ix, iy, iz) {
                    out.push(grid.cell_center(ix, iy, iz));
                }
            }
        }
    }
    out
}
