//! Clearance-weighted shortest paths through the free cells of a grid.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::Vec3;

use super::{DistanceField, OccupancyGrid, WorldError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RouteParams {
    /// Cells closer than this to an obstacle are not entered (m).
    pub min_clearance: f64,
    /// Each step costs `length * (1 + clearance_weight / clearance)`.
    pub clearance_weight: f64,
    /// Search only the horizontal layer that holds the start.
    pub planar: bool,
}

impl Default for RouteParams {
    fn default() -> Self {
        Self {
            min_clearance: 0.7,
            clearance_weight: 1.0,
            planar: true,
        }
    }
}

impl RouteParams {
    pub fn validate(&self) -> Result<(), WorldError> {
        if self.min_clearance >= 0.0 && self.clearance_weight >= 0.0 {
            Ok(())
        } else {
            Err(WorldError::InvalidSpec("route parameters must be non-negative".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    cell: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Min-heap on cost, then on cell index so pops are deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cell-center polyline from the cell of `start` to the cell of `goal`, with
/// `start` and `goal` themselves as end points. `None` when either lies off
/// the grid or no admissible path joins them. The start and goal cells are
/// always admissible.
pub fn clearance_route(
    grid: &OccupancyGrid,
    field: &DistanceField,
    start: &Vec3,
    goal: &Vec3,
    params: &RouteParams,
) -> Option<Vec<Vec3>> {
    let [nx, ny, nz] = grid.dims();
    let s = grid.cell_of(start)?;
    let g = grid.cell_of(goal)?;
    if params.planar && s[2] != g[2] {
        return None;
    }
    let (z_lo, z_hi) = if params.planar { (s[2], s[2]) } else { (0, nz - 1) };
    let source = grid.index(s[0], s[1], s[2]);
    let target = grid.index(g[0], g[1], g[2]);
    let res = grid.resolution();

    let mut dist = vec![f64::INFINITY; grid.len()];
    let mut parent = vec![usize::MAX; grid.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry { cost: 0.0, cell: source });

    while let Some(Entry { cost, cell }) = heap.pop() {
        if cell == target {
            break;
        }
        if cost > dist[cell] {
            continue;
        }
        let [x, y, z] = grid.coords(cell);
        for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                for dz in -1i64..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let (ax, ay, az) = (x as i64 + dx, y as i64 + dy, z as i64 + dz);
                    if ax < 0 || ay < 0 || az < z_lo as i64 || ax >= nx as i64 || ay >= ny as i64 || az > z_hi as i64 {
                        continue;
                    }
                    let (ax, ay, az) = (ax as usize, ay as usize, az as usize);
                    let next = grid.index(ax, ay, az);
                    let clearance = field.value(ax, ay, az);
                    if next != target && (grid.is_occupied(ax, ay, az) || clearance < params.min_clearance) {
                        continue;
                    }
                    let length = res * ((dx * dx + dy * dy + dz * dz) as f64).sqrt();
                    let step = length * (1.0 + params.clearance_weight / clearance.max(res));
                    let candidate = cost + step;
                    if candidate < dist[next] {
                        dist[next] = candidate;
                        parent[next] = cell;
                        heap.push(Entry { cost: candidate, cell: next });
                    }
                }
            }
        }
    }

    if !dist[target].is_finite() {
        return None;
    }
    let mut cells = vec![target];
    while *cells.last().unwrap() != source {
        cells.push(parent[*cells.last().unwrap()]);
    }
    cells.reverse();
    let mut path = Vec::with_capacity(cells.len() + 2);
    path.push(*start);
    for &c in &cells[1..cells.len().saturating_sub(1)] {
        let [x, y, z] = grid.coords(c);
        path.push(grid.cell_center(x, y, z));
    }
    path.push(*goal);
    Some(path)
}

/// Point at arc length `lookahead` past the path vertex nearest to `p`
/// (ties go to the later vertex), or the final vertex if the path ends
/// sooner.
pub fn lookahead_point(path: &[Vec3], p: &Vec3, lookahead: f64) -> Vec3 {
    let nearest = path
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, q)| {
            let d = (q - p).norm_squared();
            if d <= best.1 {
                (i, d)
            } else {
                best
            }
        })
        .0;
    let mut left = lookahead;
    for w in path[nearest..].windows(2) {
        let seg = (w[1] - w[0]).norm();
        if seg >= left && seg > 0.0 {
            return w[0] + (w[1] - w[0]) * (left / seg);
        }
        left -= seg;
    }
    *path.last().expect("route is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::build_edt;

    fn wall_grid() -> OccupancyGrid {
        // 4 x 2 x 0.2 m slab with a wall at x = 2 that leaves a gap near y = 1.8.
        let mut g = OccupancyGrid::new(Vec3::zeros(), 0.1, [40, 20, 1]).unwrap();
        for iy in 0..15 {
            g.set_occupied(20, iy, 0, true);
        }
        g
    }

    #[test]
    fn route_threads_the_gap() {
        let g = wall_grid();
        let f = build_edt(&g, 5.0).unwrap();
        let params = RouteParams { min_clearance: 0.15, clearance_weight: 0.0, planar: true };
        let start = Vec3::new(0.55, 0.55, 0.05);
        let goal = Vec3::new(3.55, 0.55, 0.05);
        let path = clearance_route(&g, &f, &start, &goal, &params).unwrap();
        assert_eq!(path[0], start);
        assert_eq!(*path.last().unwrap(), goal);
        for q in &path {
            assert_eq!(g.occupied_at(q), Some(false));
        }
        let crossing = path.windows(2).find(|w| w[0].x < 2.0 && w[1].x >= 2.0).unwrap();
        assert!(crossing[1].y > 1.6, "crossed at y = {}", crossing[1].y);
    }

    #[test]
    fn sealed_wall_has_no_route() {
        let mut g = wall_grid();
        for iy in 15..20 {
            g.set_occupied(20, iy, 0, true);
        }
        let f = build_edt(&g, 5.0).unwrap();
        let start = Vec3::new(0.55, 0.55, 0.05);
        let goal = Vec3::new(3.55, 0.55, 0.05);
        assert!(clearance_route(&g, &f, &start, &goal, &RouteParams::default()).is_none());
    }

    #[test]
    fn lookahead_walks_arc_length() {
        let path = [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 2.0, 0.0)];
        let q = lookahead_point(&path, &Vec3::new(0.1, 0.1, 0.0), 1.5);
        assert!((q - Vec3::new(1.0, 0.5, 0.0)).norm() < 1e-12);
        let end = lookahead_point(&path, &Vec3::new(1.0, 1.9, 0.0), 5.0);
        assert_eq!(end, path[2]);
    }
}
