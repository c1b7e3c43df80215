use proptest::prelude::*;

use swarmform_core::world::{
    build_edt, clearance_route, generate_layout, generate_scenario, lookahead_point, OccupancyGrid, RouteParams,
    ScenarioKind, ScenarioSpec,
};
use swarmform_core::Vec3;

fn spec(kind: ScenarioKind, count: usize, seed: u64) -> ScenarioSpec {
    ScenarioSpec {
        kind,
        extent: vec![26.0, 8.0],
        resolution: 0.2,
        obstacle_count: count,
        pillar_radius_range: [0.25, 0.5],
        pillar_gap: 0.4,
        corridor_width: 2.5,
        corridor_length: None,
        seed,
        start: [3.5, 4.0, 1.5],
        goal: [22.5, 4.0, 1.5],
        clearance_radius: 1.0,
    }
}

fn centers(grid: &OccupancyGrid) -> Vec<(Vec3, bool)> {
    (0..grid.len())
        .map(|i| {
            let [x, y, z] = grid.coords(i);
            (grid.cell_center(x, y, z), grid.cells()[i])
        })
        .collect()
}

#[test]
fn corridor_cells_match_the_wall_geometry() {
    let s = spec(ScenarioKind::Corridor, 0, 0);
    let grid = generate_scenario(&s).unwrap();
    let (x0, x1, y0, y1) = s.corridor_channel();
    assert!((y1 - y0 - 2.5).abs() < 1e-12);
    for (c, occupied) in centers(&grid) {
        let wall = c.x >= x0 && c.x <= x1 && (c.y < y0 || c.y > y1);
        assert_eq!(occupied, wall, "cell at {c:?}");
    }
}

#[test]
fn pillar_worlds_are_reproducible_and_keep_endpoints_clear() {
    for seed in [1, 2, 3] {
        let mut s = spec(ScenarioKind::PillarField, 30, seed);
        s.extent = vec![50.0, 40.0];
        s.start = [4.0, 20.0, 1.5];
        s.goal = [46.0, 20.0, 1.5];
        s.clearance_radius = 4.0;
        let a = generate_layout(&s).unwrap();
        let b = generate_layout(&s).unwrap();
        assert_eq!(a.grid, b.grid);
        assert_eq!(a.pillars.len(), 30);
        for p in &a.pillars {
            for e in [s.start, s.goal] {
                assert!(((p.x - e[0]).powi(2) + (p.y - e[1]).powi(2)).sqrt() > p.radius + 4.0);
            }
            for q in &a.pillars {
                if p != q {
                    let d = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt();
                    assert!(d >= p.radius + q.radius + 0.4 - 1e-12);
                }
            }
        }
    }
}

#[test]
fn grid_bytes_round_trip() {
    let grid = generate_scenario(&spec(ScenarioKind::Corridor, 0, 0)).unwrap();
    assert_eq!(OccupancyGrid::from_bytes(&grid.to_bytes()).unwrap(), grid);
}

#[test]
fn invalid_specs_are_rejected() {
    let mut s = spec(ScenarioKind::Corridor, 3, 0);
    assert!(generate_scenario(&s).is_err());
    s.obstacle_count = 0;
    s.start = [30.0, 4.0, 1.5];
    assert!(generate_scenario(&s).is_err());
    let mut s = spec(ScenarioKind::PillarField, 0, 0);
    s.pillar_radius_range = [0.5, 0.25];
    assert!(generate_scenario(&s).is_err());
}

#[test]
fn route_through_the_corridor_stays_clear() {
    let s = spec(ScenarioKind::Corridor, 0, 0);
    let grid = generate_scenario(&s).unwrap();
    let field = build_edt(&grid, 5.0).unwrap();
    let params = RouteParams {
        min_clearance: 1.0,
        ..RouteParams::default()
    };
    let path = clearance_route(&grid, &field, &s.start(), &s.goal(), &params).unwrap();
    for q in &path[1..path.len() - 1] {
        assert!(field.query(q) >= 1.0 - 1e-9);
        assert!((q.z - 1.5).abs() <= 0.1);
    }
    // The channel center line is the clearest way through.
    let (x0, x1, _, _) = s.corridor_channel();
    for q in path.iter().filter(|q| q.x > x0 + 0.5 && q.x < x1 - 0.5) {
        assert!((q.y - 4.0).abs() <= 0.15, "off-center at {q:?}");
    }
    let carrot = lookahead_point(&path, &s.start(), 2.0);
    assert!(carrot.x > s.start[0] + 1.5);
}

#[test]
fn closed_corridor_has_no_route() {
    let mut s = spec(ScenarioKind::Corridor, 0, 0);
    s.corridor_width = 0.0;
    let grid = generate_scenario(&s).unwrap();
    let field = build_edt(&grid, 5.0).unwrap();
    assert!(clearance_route(&grid, &field, &s.start(), &s.goal(), &RouteParams::default()).is_none());
}

fn brute_distances(grid: &OccupancyGrid) -> Vec<f64> {
    let cells = centers(grid);
    let occupied: Vec<Vec3> = cells.iter().filter(|c| c.1).map(|c| c.0).collect();
    cells
        .iter()
        .map(|(c, _)| occupied.iter().map(|o| (o - c).norm()).fold(f64::INFINITY, f64::min))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn edt_matches_brute_force(
        dims in (1usize..9, 1usize..9, 1usize..6),
        bits in proptest::collection::vec(any::<bool>(), 8 * 8 * 5),
        density in 1u8..6,
    ) {
        let (nx, ny, nz) = dims;
        let mut grid = OccupancyGrid::new(Vec3::new(-1.0, 2.0, 0.0), 0.25, [nx, ny, nz]).unwrap();
        for i in 0..grid.len() {
            let [x, y, z] = grid.coords(i);
            // Thin the random bits to keep some grids sparse.
            let on = bits[i] && (i % density as usize == 0);
            grid.set_occupied(x, y, z, on);
        }
        let cap = 1.3;
        let field = build_edt(&grid, cap).unwrap();
        for (got, want) in field.values().iter().zip(brute_distances(&grid)) {
            prop_assert!((got - want.min(cap)).abs() < 1e-12, "{} vs {}", got, want);
        }
    }
}
