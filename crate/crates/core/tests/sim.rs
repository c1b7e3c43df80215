use proptest::prelude::*;

use swarmform_core::formation::FormationShape;
use swarmform_core::sim::{formation_similarity, run_episode, trace_csv, Outcome, SwarmConfig};
use swarmform_core::world::ScenarioSpec;
use swarmform_core::Vec3;

fn swarm() -> SwarmConfig {
    SwarmConfig::from_toml(include_str!("../../../configs/swarm.toml")).unwrap()
}

fn scenario(name: &str) -> ScenarioSpec {
    let path = format!("{}/../../configs/scenarios/{name}.toml", env!("CARGO_MANIFEST_DIR"));
    toml::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn empty_world_is_crossed_cleanly() {
    let cfg = swarm();
    let report = run_episode(&cfg, &scenario("empty")).unwrap();
    assert_eq!(report.outcome, Outcome::Success);
    assert!(report.reached_goal);
    assert!(report.completion_time < 40.0, "took {} s", report.completion_time);
    assert!(report.avg_similarity < 0.05);
    assert!(report.min_mutual_distance >= 2.0 * cfg.uav_radius);
    assert_eq!(report.guidance_violations, 0);
    assert_eq!(report.hold_cycles, 0);
}

#[test]
fn sealed_corridor_times_out_without_collisions() {
    let cfg = SwarmConfig {
        episode_timeout: 20.0,
        ..swarm()
    };
    let report = run_episode(&cfg, &scenario("blocked")).unwrap();
    assert_eq!(report.outcome, Outcome::Timeout);
    assert!(!report.success);
    assert!(report.min_obstacle_clearance >= cfg.uav_radius);
    assert!((report.completion_time - 20.0).abs() < 1e-9);
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = SwarmConfig {
        episode_timeout: 8.0,
        master_seed: 3,
        ..swarm()
    };
    let mut world = scenario("middle");
    world.seed = 3;
    let a = run_episode(&cfg, &world).unwrap();
    let b = run_episode(&cfg, &world).unwrap();
    assert_eq!(trace_csv(&a.trace), trace_csv(&b.trace));
    assert_eq!(a.to_toml(), b.to_toml());
    let c = run_episode(&SwarmConfig { master_seed: 4, ..cfg }, &world).unwrap();
    assert_ne!(trace_csv(&a.trace), trace_csv(&c.trace));
}

#[test]
fn config_round_trips_and_rejects_unknown_keys() {
    let cfg = swarm();
    assert_eq!(SwarmConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    assert!(SwarmConfig::from_toml("bogus = 1").is_err());
    assert!(SwarmConfig::from_toml("[sample]\nsteps = 10").is_err());
    assert!(SwarmConfig::from_toml("n_uavs = 3").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn similarity_ignores_translation_and_scale(
        jitter in proptest::collection::vec(-0.3f64..0.3, 18),
        shift in (-50.0f64..50.0, -50.0f64..50.0, -5.0f64..5.0),
        scale in 0.2f64..5.0,
    ) {
        let shape = FormationShape::triangle6(1.6);
        let positions: Vec<Vec3> = shape
            .offsets()
            .iter()
            .enumerate()
            .map(|(i, p)| p * 0.8 + Vec3::new(jitter[3 * i], jitter[3 * i + 1], jitter[3 * i + 2]))
            .collect();
        let f = formation_similarity(&positions, shape.offsets()).unwrap();
        let moved: Vec<Vec3> = positions
            .iter()
            .map(|p| p * scale + Vec3::new(shift.0, shift.1, shift.2))
            .collect();
        let g = formation_similarity(&moved, shape.offsets()).unwrap();
        prop_assert!(f >= 0.0);
        prop_assert!((f - g).abs() <= 1e-9 * f.max(1e-3), "{} vs {}", f, g);
    }

    #[test]
    fn exact_shapes_have_zero_error(scale in 0.1f64..3.0, cx in -10.0f64..10.0) {
        let shape = FormationShape::triangle6(1.6);
        let positions: Vec<Vec3> = shape.offsets().iter().map(|p| p * scale + Vec3::new(cx, 2.0, 1.0)).collect();
        prop_assert!(formation_similarity(&positions, shape.offsets()).unwrap() < 1e-12);
    }
}
