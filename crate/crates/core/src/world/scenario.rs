use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::Vec3;

use super::{OccupancyGrid, WorldError};

/// World height used when the extent only names the horizontal footprint.
pub const DEFAULT_HEIGHT: f64 = 3.0;
const ATTEMPTS_PER_PILLAR: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    PillarField,
    Corridor,
}

/// Parameters of a generated world. Obstacles are vertical: pillars and
/// walls span the full world height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// `[x, y]` or `[x, y, height]` in meters; the world starts at the origin.
    pub extent: Vec<f64>,
    #[serde(default = "defaults::resolution")]
    pub resolution: f64,
    #[serde(default)]
    pub obstacle_count: usize,
    #[serde(default = "defaults::pillar_radius_range")]
    pub pillar_radius_range: [f64; 2],
    /// Minimum free gap between two pillar surfaces.
    #[serde(default = "defaults::pillar_gap")]
    pub pillar_gap: f64,
    #[serde(default = "defaults::corridor_width")]
    pub corridor_width: f64,
    /// Length of the walled section along x, centered in the world.
    /// Defaults to 40% of the x extent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corridor_length: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    pub start: [f64; 3],
    pub goal: [f64; 3],
    /// Pillars keep at least this horizontal distance from start and goal.
    #[serde(default = "defaults::clearance_radius")]
    pub clearance_radius: f64,
}

mod defaults {
    pub fn resolution() -> f64 {
        0.2
    }
    pub fn pillar_radius_range() -> [f64; 2] {
        [0.25, 0.5]
    }
    pub fn pillar_gap() -> f64 {
        0.4
    }
    pub fn corridor_width() -> f64 {
        2.5
    }
    pub fn clearance_radius() -> f64 {
        4.0
    }
}

/// A rasterized vertical cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pillar {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

/// Generated world plus the analytic obstacles it was rasterized from.
#[derive(Debug, Clone)]
pub struct ScenarioLayout {
    pub grid: OccupancyGrid,
    pub pillars: Vec<Pillar>,
}

impl ScenarioSpec {
    pub fn height(&self) -> f64 {
        self.extent.get(2).copied().unwrap_or(DEFAULT_HEIGHT)
    }

    pub fn start(&self) -> Vec3 {
        Vec3::from(self.start)
    }

    pub fn goal(&self) -> Vec3 {
        Vec3::from(self.goal)
    }

    /// `(x0, x1, y0, y1)` of the free channel through the walled section.
    pub fn corridor_channel(&self) -> (f64, f64, f64, f64) {
        let (ex, ey) = (self.extent[0], self.extent[1]);
        let length = self.corridor_length.unwrap_or(0.4 * ex);
        let x0 = 0.5 * (ex - length);
        let y0 = 0.5 * (ey - self.corridor_width);
        (x0, x0 + length, y0, y0 + self.corridor_width)
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        let bad = |msg: &str| Err(WorldError::InvalidSpec(msg.to_string()));
        if !(self.extent.len() == 2 || self.extent.len() == 3) {
            return bad("extent must have 2 or 3 entries");
        }
        if self.extent.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return bad("extents must be positive");
        }
        if !(self.resolution > 0.0) {
            return bad("resolution must be positive");
        }
        let [rlo, rhi] = self.pillar_radius_range;
        if !(rlo > 0.0 && rlo <= rhi) {
            return bad("pillar_radius_range must satisfy 0 < min <= max");
        }
        if !(self.pillar_gap >= 0.0) || !(self.clearance_radius >= 0.0) {
            return bad("pillar_gap and clearance_radius must be non-negative");
        }
        if self.kind == ScenarioKind::Corridor {
            if !(self.corridor_width >= 0.0) {
                return bad("corridor_width must be non-negative");
            }
            if self.obstacle_count != 0 {
                return bad("corridor worlds take no pillars (obstacle_count = 0)");
            }
            if let Some(len) = self.corridor_length {
                if !(len > 0.0 && len <= self.extent[0]) {
                    return bad("corridor_length must lie in (0, extent x]");
                }
            }
        }
        let hi = [self.extent[0], self.extent[1], self.height()];
        for p in [self.start, self.goal] {
            if (0..3).any(|k| !(p[k] > 0.0 && p[k] < hi[k])) {
                return bad("start and goal must lie strictly inside the world");
            }
        }
        Ok(())
    }
}

/// Rasterize the world described by `spec`. Pure function of the spec.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<OccupancyGrid, WorldError> {
    generate_layout(spec).map(|layout| layout.grid)
}

pub fn generate_layout(spec: &ScenarioSpec) -> Result<ScenarioLayout, WorldError> {
    spec.validate()?;
    let r = spec.resolution;
    let cells = |len: f64| ((len / r).round() as usize).max(1);
    let dims = [cells(spec.extent[0]), cells(spec.extent[1]), cells(spec.height())];
    let mut grid = OccupancyGrid::new(Vec3::zeros(), r, dims)?;

    let pillars = match spec.kind {
        ScenarioKind::PillarField => place_pillars(spec)?,
        ScenarioKind::Corridor => Vec::new(),
    };

    let [nx, ny, nz] = dims;
    let corridor = (spec.kind == ScenarioKind::Corridor).then(|| spec.corridor_channel());
    for ix in 0..nx {
        for iy in 0..ny {
            let c = grid.cell_center(ix, iy, 0);
            let in_pillar = pillars.iter().any(|p| {
                let (dx, dy) = (c.x - p.x, c.y - p.y);
                dx * dx + dy * dy <= p.radius * p.radius
            });
            let in_wall = corridor.is_some_and(|(x0, x1, y0, y1)| {
                c.x >= x0 && c.x <= x1 && (c.y < y0 || c.y > y1)
            });
            if in_pillar || in_wall {
                for iz in 0..nz {
                    grid.set_occupied(ix, iy, iz, true);
                }
            }
        }
    }

    for (name, p) in [("start", spec.start()), ("goal", spec.goal())] {
        if grid.occupied_at(&p) != Some(false) {
            return Err(WorldError::InvalidSpec(format!("{name} is not in free space")));
        }
    }
    Ok(ScenarioLayout { grid, pillars })
}

fn place_pillars(spec: &ScenarioSpec) -> Result<Vec<Pillar>, WorldError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let [rlo, rhi] = spec.pillar_radius_range;
    let (ex, ey) = (spec.extent[0], spec.extent[1]);
    let keep_clear = [spec.start, spec.goal];
    let mut pillars: Vec<Pillar> = Vec::with_capacity(spec.obstacle_count);

    for _ in 0..spec.obstacle_count {
        let mut placed = false;
        for _ in 0..ATTEMPTS_PER_PILLAR {
            let radius = if rhi > rlo { rng.random_range(rlo..=rhi) } else { rlo };
            if 2.0 * radius >= ex || 2.0 * radius >= ey {
                break;
            }
            let x = rng.random_range(radius..ex - radius);
            let y = rng.random_range(radius..ey - radius);
            let clear_of_endpoints = keep_clear.iter().all(|s| {
                let d = ((x - s[0]).powi(2) + (y - s[1]).powi(2)).sqrt();
                d > radius + spec.clearance_radius
            });
            let clear_of_others = pillars.iter().all(|p| {
                let d = ((x - p.x).powi(2) + (y - p.y).powi(2)).sqrt();
                d >= radius + p.radius + spec.pillar_gap
            });
            if clear_of_endpoints && clear_of_others {
                pillars.push(Pillar { x, y, radius });
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(WorldError::PlacementFailed {
                placed: pillars.len(),
                requested: spec.obstacle_count,
            });
        }
    }
    Ok(pillars)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn pillar_spec(count: usize, seed: u64) -> ScenarioSpec {
        ScenarioSpec {
            kind: ScenarioKind::PillarField,
            extent: vec![50.0, 40.0],
            resolution: 0.2,
            obstacle_count: count,
            pillar_radius_range: [0.25, 0.5],
            pillar_gap: 0.4,
            corridor_width: 2.5,
            corridor_length: None,
            seed,
            start: [4.0, 20.0, 1.5],
            goal: [46.0, 20.0, 1.5],
            clearance_radius: 4.0,
        }
    }

    #[test]
    fn zero_pillars_is_all_free() {
        let g = generate_scenario(&pillar_spec(0, 1)).unwrap();
        assert_eq!(g.dims(), [250, 200, 15]);
        assert_eq!(g.occupied_count(), 0);
    }

    #[test]
    fn same_seed_same_world() {
        let a = generate_scenario(&pillar_spec(50, 11)).unwrap();
        let b = generate_scenario(&pillar_spec(50, 11)).unwrap();
        let c = generate_scenario(&pillar_spec(50, 12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn pillars_respect_clearance_and_gap() {
        let spec = pillar_spec(150, 7);
        let layout = generate_layout(&spec).unwrap();
        assert_eq!(layout.pillars.len(), 150);
        for (i, p) in layout.pillars.iter().enumerate() {
            for s in [spec.start, spec.goal] {
                let d = ((p.x - s[0]).powi(2) + (p.y - s[1]).powi(2)).sqrt();
                assert!(d > p.radius + spec.clearance_radius);
            }
            for q in &layout.pillars[i + 1..] {
                let d = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt();
                assert!(d >= p.radius + q.radius + spec.pillar_gap);
            }
        }
    }

    #[test]
    fn infeasible_request_errors() {
        let mut spec = pillar_spec(100_000, 3);
        spec.extent = vec![20.0, 20.0];
        spec.start = [2.0, 2.0, 1.5];
        spec.goal = [18.0, 18.0, 1.5];
        assert!(matches!(
            generate_scenario(&spec),
            Err(WorldError::PlacementFailed { .. })
        ));
    }

    #[test]
    fn validation_catches_bad_specs() {
        let mut s = pillar_spec(0, 0);
        s.extent = vec![50.0];
        assert!(s.validate().is_err());
        let mut s = pillar_spec(0, 0);
        s.goal = [60.0, 20.0, 1.5];
        assert!(s.validate().is_err());
        let mut s = pillar_spec(0, 0);
        s.pillar_radius_range = [0.5, 0.25];
        assert!(s.validate().is_err());
        let mut s = pillar_spec(3, 0);
        s.kind = ScenarioKind::Corridor;
        assert!(s.validate().is_err());
    }

    #[test]
    fn explicit_height_is_used() {
        let mut s = pillar_spec(0, 0);
        s.extent = vec![10.0, 8.0, 2.0];
        s.start = [1.0, 4.0, 1.0];
        s.goal = [9.0, 4.0, 1.0];
        assert_eq!(generate_scenario(&s).unwrap().dims(), [50, 40, 10]);
    }
}
