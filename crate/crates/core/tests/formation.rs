use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swarmform_core::corridor::{generate_sfc, FormationSafeRegion, SfcParams};
use swarmform_core::formation::{
    plan_formation_paths, FormationConfig, FormationError, FormationShape, FrontWeights, PlanRequest, SampleParams,
};
use swarmform_core::world::{build_edt, generate_scenario, ScenarioKind, ScenarioSpec};
use swarmform_core::Vec3;

fn dense_spec() -> ScenarioSpec {
    ScenarioSpec {
        kind: ScenarioKind::PillarField,
        extent: vec![50.0, 40.0],
        resolution: 0.2,
        obstacle_count: 150,
        pillar_radius_range: [0.25, 0.5],
        pillar_gap: 0.4,
        corridor_width: 2.5,
        corridor_length: None,
        seed: 1,
        start: [4.0, 20.0, 1.5],
        goal: [46.0, 20.0, 1.5],
        clearance_radius: 4.0,
    }
}

#[test]
fn dense_world_waypoints_stay_in_their_owners_corridors() {
    let spec = dense_spec();
    let grid = generate_scenario(&spec).unwrap();
    let field = build_edt(&grid, 5.0).unwrap();
    let shape = FormationShape::triangle6(1.6);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut planned = 0;
    for call in 0..20u64 {
        // A jittered formation somewhere free in the world.
        let (positions, center) = loop {
            let c = Vec3::new(rng.random_range(5.0..45.0), rng.random_range(5.0..35.0), 1.5);
            let ps: Vec<Vec3> = FormationConfig::new(0.7, c, shape.clone())
                .targets()
                .into_iter()
                .map(|p| p + Vec3::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1), 0.0))
                .collect();
            if ps.iter().all(|p| field.query(p) >= 0.5) {
                break (ps, c);
            }
        };
        let region = FormationSafeRegion::new(
            positions
                .iter()
                .map(|p| generate_sfc(p, &grid, &SfcParams::default()).unwrap())
                .collect(),
        );
        let d_obs: Vec<f64> = positions.iter().map(|p| field.query(p)).collect();
        let assignment: Vec<usize> = (0..6).collect();
        let request = PlanRequest {
            start_center: center,
            start_scale: 0.7,
            region: &region,
            assignment: &assignment,
            positions: &positions,
            d_obs: &d_obs,
            goal_center: spec.goal(),
            shape: &shape,
            prev_direction: None,
            assignment_epsilon: 1e-4,
        };
        let params = SampleParams {
            seed: call,
            ..SampleParams::default()
        };
        match plan_formation_paths(&request, &params, &FrontWeights::default()) {
            Ok(out) => {
                planned += 1;
                for uav in 0..6 {
                    for w in out.paths.path(uav) {
                        assert!(region.get(uav).contains(w), "call {call} uav {uav} waypoint {w:?}");
                    }
                }
            }
            Err(FormationError::NoSafeStep) => {}
            Err(e) => panic!("call {call}: {e}"),
        }
    }
    assert!(planned >= 15, "only {planned} of 20 calls planned");
}

#[test]
fn planning_is_deterministic_per_seed() {
    let shape = FormationShape::triangle6(1.6);
    let center = Vec3::new(5.0, 5.0, 1.5);
    let positions = FormationConfig::new(1.0, center, shape.clone()).targets();
    let region = FormationSafeRegion::new(
        positions
            .iter()
            .map(|p| {
                let h = Vec3::repeat(3.0);
                swarmform_core::corridor::Polytope::from_box(p - h, p + h, *p).unwrap()
            })
            .collect(),
    );
    let d_obs = vec![3.0; 6];
    let assignment: Vec<usize> = (0..6).collect();
    let request = PlanRequest {
        start_center: center,
        start_scale: 1.0,
        region: &region,
        assignment: &assignment,
        positions: &positions,
        d_obs: &d_obs,
        goal_center: Vec3::new(30.0, 5.0, 1.5),
        shape: &shape,
        prev_direction: None,
        assignment_epsilon: 1e-4,
    };
    let params = SampleParams {
        seed: 5,
        ..SampleParams::default()
    };
    let a = plan_formation_paths(&request, &params, &FrontWeights::default()).unwrap();
    let b = plan_formation_paths(&request, &params, &FrontWeights::default()).unwrap();
    assert_eq!(a, b);
    let other = SampleParams {
        seed: 6,
        ..SampleParams::default()
    };
    let c = plan_formation_paths(&request, &other, &FrontWeights::default()).unwrap();
    assert_ne!(a.sequence_costs, c.sequence_costs);
}

#[test]
fn planar_sampling_keeps_height() {
    let shape = FormationShape::triangle6(1.6);
    let center = Vec3::new(5.0, 5.0, 1.5);
    let positions = FormationConfig::new(1.0, center, shape.clone()).targets();
    let region = FormationSafeRegion::new(
        positions
            .iter()
            .map(|p| {
                let h = Vec3::repeat(4.0);
                swarmform_core::corridor::Polytope::from_box(p - h, p + h, *p).unwrap()
            })
            .collect(),
    );
    let d_obs = vec![3.0; 6];
    let assignment: Vec<usize> = (0..6).collect();
    let request = PlanRequest {
        start_center: center,
        start_scale: 1.0,
        region: &region,
        assignment: &assignment,
        positions: &positions,
        d_obs: &d_obs,
        goal_center: Vec3::new(30.0, 9.0, 1.5),
        shape: &shape,
        prev_direction: None,
        assignment_epsilon: 1e-4,
    };
    let params = SampleParams {
        planar: true,
        ..SampleParams::default()
    };
    let out = plan_formation_paths(&request, &params, &FrontWeights::default()).unwrap();
    for fc in &out.sequence.configs {
        assert_eq!(fc.center.z, 1.5);
    }
}
