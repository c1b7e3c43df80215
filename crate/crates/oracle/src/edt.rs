use rand::Rng;
use swarmform_core::world::OccupancyGrid;
use swarmform_core::Vec3;

/// Minimum squared distance, in cell units, from every cell to any occupied
/// cell. `None` when the grid has no obstacle.
pub fn brute_force_squared(grid: &OccupancyGrid) -> Option<Vec<u64>> {
    let [nx, ny, nz] = grid.dims();
    let mut occupied = Vec::new();
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                if grid.is_occupied(x, y, z) {
                    occupied.push([x as i64, y as i64, z as i64]);
                }
            }
        }
    }
    if occupied.is_empty() {
        return None;
    }
    let mut out = Vec::with_capacity(grid.len());
    for x in 0..nx as i64 {
        for y in 0..ny as i64 {
            for z in 0..nz as i64 {
                let best = occupied
                    .iter()
                    .map(|o| ((o[0] - x).pow(2) + (o[1] - y).pow(2) + (o[2] - z).pow(2)) as u64)
                    .min()
                    .unwrap();
                out.push(best);
            }
        }
    }
    Some(out)
}

/// Distance field values in meters, clamped to `d_cap`.
pub fn brute_force_edt(grid: &OccupancyGrid, d_cap: f64) -> Vec<f64> {
    match brute_force_squared(grid) {
        None => vec![d_cap; grid.len()],
        Some(sq) => sq
            .into_iter()
            .map(|d2| ((d2 as f64).sqrt() * grid.resolution()).min(d_cap))
            .collect(),
    }
}

/// Distance from `p` to the nearest occupied cell center, or infinity.
pub fn brute_force_point_distance(grid: &OccupancyGrid, p: &Vec3) -> f64 {
    let [nx, ny, nz] = grid.dims();
    let mut best = f64::INFINITY;
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                if grid.is_occupied(x, y, z) {
                    best = best.min((grid.cell_center(x, y, z) - p).norm());
                }
            }
        }
    }
    best
}

/// Grid with each cell independently occupied with probability `occupancy`.
pub fn random_grid<R: Rng>(rng: &mut R, dims: [usize; 3], resolution: f64, occupancy: f64) -> OccupancyGrid {
    let mut g = OccupancyGrid::new(Vec3::new(-1.0, 0.5, 0.0), resolution, dims).unwrap();
    for x in 0..dims[0] {
        for y in 0..dims[1] {
            for z in 0..dims[2] {
                if rng.random::<f64>() < occupancy {
                    g.set_occupied(x, y, z, true);
                }
            }
        }
    }
    g
}
