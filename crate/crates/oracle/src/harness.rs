//! Heavier property harnesses used by the acceptance run: the corridor
//! connectivity check over seeded planning calls and the MPPI contracts.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarmform_core::corridor::{generate_sfc, FormationSafeRegion, SfcParams};
use swarmform_core::formation::{
    plan_formation_paths, FormationConfig, FormationShape, FrontWeights, PlanRequest, SampleParams,
};
use swarmform_core::mppi::{
    mppi_step, mppi_step_with_hook, propagate, ControlInput, CostContext, MppiParams, RunningCostParams, UavState,
};
use swarmform_core::world::{build_edt, generate_scenario, DistanceField, OccupancyGrid, ScenarioKind, ScenarioSpec};
use swarmform_core::Vec3;

/// Pillar world matching the shipped sparse/middle/dense scenarios.
pub fn pillar_world(obstacles: usize, seed: u64) -> ScenarioSpec {
    ScenarioSpec {
        kind: ScenarioKind::PillarField,
        extent: vec![50.0, 40.0],
        resolution: 0.2,
        obstacle_count: obstacles,
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

#[derive(Debug, Clone, Default)]
pub struct ConnectivityReport {
    pub calls: usize,
    /// Calls that returned no path (all sequences unsafe at step 0).
    pub no_safe_step: usize,
    pub waypoints: usize,
    pub waypoints_outside: usize,
    pub segments: usize,
    pub segments_blocked: usize,
    pub elapsed: Duration,
}

impl ConnectivityReport {
    pub fn passed(&self) -> bool {
        self.waypoints > 0 && self.waypoints_outside == 0 && self.segments_blocked == 0
    }
}

/// Straight segment sampled every tenth of a cell; leaving the map counts as
/// a collision.
pub fn segment_clear(grid: &OccupancyGrid, a: &Vec3, b: &Vec3) -> bool {
    let step = grid.resolution() / 10.0;
    let n = ((b - a).norm() / step).ceil().max(1.0) as usize;
    (0..=n).all(|k| {
        let p = a + (b - a) * (k as f64 / n as f64);
        grid.occupied_at(&p) == Some(false)
    })
}

/// Formation positions around a random center whose every member keeps at
/// least `min_clearance` from obstacles.
fn free_formation<R: Rng>(
    rng: &mut R,
    field: &DistanceField,
    shape: &FormationShape,
    min_clearance: f64,
) -> Vec<Vec3> {
    loop {
        let center = Vec3::new(rng.random_range(5.0..45.0), rng.random_range(5.0..35.0), 1.5);
        let positions = FormationConfig::new(1.0, center, shape.clone()).targets();
        let jittered: Vec<Vec3> = positions
            .iter()
            .map(|p| p + Vec3::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)))
            .collect();
        if jittered.iter().all(|p| field.query(p) >= min_clearance) {
            return jittered;
        }
    }
}

/// `calls` seeded planning calls spread over the 50/100/150-pillar worlds.
/// Every emitted waypoint must lie in its owner's polytope, and every
/// segment from the current position through the waypoints must be free.
pub fn connectivity_run(calls: usize) -> ConnectivityReport {
    let start = Instant::now();
    let shape = FormationShape::triangle6(1.6);
    let worlds: Vec<(OccupancyGrid, DistanceField)> = [50, 100, 150]
        .iter()
        .map(|&n| {
            let grid = generate_scenario(&pillar_world(n, 1)).expect("shipped world parameters are valid");
            let field = build_edt(&grid, 5.0).expect("positive cap");
            (grid, field)
        })
        .collect();
    let sfc = SfcParams::default();
    let weights = FrontWeights::default();
    let goal = Vec3::new(46.0, 20.0, 1.5);
    let mut report = ConnectivityReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0);

    for call in 0..calls {
        let (grid, field) = &worlds[call % worlds.len()];
        let positions = free_formation(&mut rng, field, &shape, 0.5);
        let polytopes = positions
            .iter()
            .map(|p| generate_sfc(p, grid, &sfc).expect("free position"))
            .collect();
        let region = FormationSafeRegion::new(polytopes);
        let d_obs: Vec<f64> = positions.iter().map(|p| field.query(p)).collect();
        let assignment: Vec<usize> = (0..positions.len()).collect();
        let start_center = positions[0] - shape.offsets()[0];
        let request = PlanRequest {
            start_center,
            start_scale: 1.0,
            region: &region,
            assignment: &assignment,
            positions: &positions,
            d_obs: &d_obs,
            goal_center: goal,
            shape: &shape,
            prev_direction: None,
            assignment_epsilon: 1e-4,
        };
        let params = SampleParams {
            seed: call as u64,
            ..SampleParams::default()
        };
        report.calls += 1;
        let outcome = match plan_formation_paths(&request, &params, &weights) {
            Ok(o) => o,
            Err(_) => {
                report.no_safe_step += 1;
                continue;
            }
        };
        for (uav, path) in outcome.paths.paths.iter().enumerate() {
            let poly = region.get(uav);
            let mut prev = positions[uav];
            for wp in path {
                report.waypoints += 1;
                if !poly.contains(wp) {
                    report.waypoints_outside += 1;
                }
                report.segments += 1;
                if !segment_clear(grid, &prev, wp) {
                    report.segments_blocked += 1;
                }
                prev = *wp;
            }
        }
    }
    report.elapsed = start.elapsed();
    report
}

/// Obstacle-free field for the single-UAV harnesses.
pub fn open_field() -> DistanceField {
    let grid = OccupancyGrid::new(Vec3::new(-10.0, -10.0, 0.0), 0.5, [40, 40, 12]).unwrap();
    build_edt(&grid, 5.0).unwrap()
}

fn random_setup<R: Rng>(rng: &mut R, p: usize) -> (UavState, Vec<Vec3>, Vec<ControlInput>) {
    let x0 = UavState {
        p: Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(1.0..2.0)),
        v: Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.0),
        a: Vec3::zeros(),
        psi: rng.random_range(-3.0..3.0),
    };
    let goal = x0.p + Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), 0.0);
    let waypoints = (0..p).map(|k| x0.p + (goal - x0.p) * ((k + 1) as f64 / p as f64)).collect();
    let nominal = (0..p)
        .map(|_| ControlInput::new(Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.0), 0.0))
        .collect();
    (x0, waypoints, nominal)
}

#[derive(Debug, Clone)]
pub struct MppiContractReport {
    pub simplex_calls: usize,
    /// Largest `|sum(w) - 1|` seen.
    pub simplex_max_error: f64,
    pub simplex_negative: usize,
    pub baseline_bitwise: bool,
    pub shift_ok: bool,
    pub convergence: ConvergenceReport,
}

impl MppiContractReport {
    pub fn passed(&self) -> bool {
        self.simplex_max_error <= 1e-12
            && self.simplex_negative == 0
            && self.baseline_bitwise
            && self.shift_ok
            && self.convergence.passed()
    }
}

/// Rollout costs rounded to multiples of 2^-20 so adding a power-of-two
/// constant is exact.
fn quantize(s: f64) -> f64 {
    (s * 1_048_576.0).round() / 1_048_576.0
}

pub fn mppi_contracts(simplex_calls: usize) -> MppiContractReport {
    let field = open_field();
    let running = RunningCostParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x3d1);
    let mut max_error = 0.0f64;
    let mut negative = 0;
    let mut shift_ok = true;

    for call in 0..simplex_calls {
        let params = MppiParams {
            seed: call as u64,
            ..MppiParams::default()
        };
        let (x0, waypoints, nominal) = random_setup(&mut rng, params.horizon_steps);
        let ctx = CostContext {
            waypoints: &waypoints,
            field: &field,
            neighbors: &[],
            params: &running,
            dt: params.dt,
        };
        let out = mppi_step(&x0, &nominal, &ctx, &params, 0.0).expect("valid inputs");
        let sum: f64 = out.weights.iter().sum();
        max_error = max_error.max((sum - 1.0).abs());
        negative += out.weights.iter().filter(|w| !(**w >= 0.0)).count();
        let p = out.optimal.len();
        shift_ok &= out.nominal[..p - 1] == out.optimal[1..] && out.nominal[p - 1] == ControlInput::default();
    }

    let params = MppiParams {
        seed: 7,
        ..MppiParams::default()
    };
    let (x0, waypoints, nominal) = random_setup(&mut rng, params.horizon_steps);
    let ctx = CostContext {
        waypoints: &waypoints,
        field: &field,
        neighbors: &[],
        params: &running,
        dt: params.dt,
    };
    let base = mppi_step_with_hook(&x0, &nominal, &ctx, &params, 0.0, quantize).unwrap();
    let shifted = mppi_step_with_hook(&x0, &nominal, &ctx, &params, 0.0, |s| quantize(s) + 1024.0).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let controls = |u: &[ControlInput]| u.iter().flat_map(|c| c.to_array()).map(f64::to_bits).collect::<Vec<_>>();
    let baseline_bitwise =
        bits(&base.weights) == bits(&shifted.weights) && controls(&base.optimal) == controls(&shifted.optimal);

    MppiContractReport {
        simplex_calls,
        simplex_max_error: max_error,
        simplex_negative: negative,
        baseline_bitwise,
        shift_ok,
        convergence: convergence_harness(),
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Tracking error after each executed step.
    pub errors: Vec<f64>,
    /// Median of each block of ten iterations.
    pub window_medians: Vec<f64>,
}

impl ConvergenceReport {
    pub fn terminal_error(&self) -> f64 {
        *self.errors.last().unwrap_or(&f64::INFINITY)
    }

    pub fn passed(&self) -> bool {
        self.terminal_error() < 0.1 && self.window_medians.windows(2).all(|w| w[1] <= w[0])
    }
}

/// A hovering UAV with a static waypoint 2 m away: 50 iterations, each
/// executing the first optimal control and warm-starting from the shifted
/// nominal.
pub fn convergence_harness() -> ConvergenceReport {
    let field = open_field();
    let running = RunningCostParams::default();
    let mut params = MppiParams::default();
    let target = Vec3::new(2.0, 0.0, 1.5);
    let waypoints = vec![target; params.horizon_steps];
    let mut x = UavState::at_rest(Vec3::new(0.0, 0.0, 1.5), 0.0);
    let mut nominal = vec![ControlInput::default(); params.horizon_steps];
    let mut errors = Vec::with_capacity(50);
    for iter in 0..50 {
        params.seed = 1000 + iter;
        let ctx = CostContext {
            waypoints: &waypoints,
            field: &field,
            neighbors: &[],
            params: &running,
            dt: params.dt,
        };
        let out = mppi_step(&x, &nominal, &ctx, &params, iter as f64 * params.dt).expect("valid inputs");
        x = propagate(&x, &out.optimal[0], params.dt);
        nominal = out.nominal;
        errors.push((x.p - target).norm());
    }
    let window_medians = errors
        .chunks(10)
        .map(|w| {
            let mut w = w.to_vec();
            w.sort_by(f64::total_cmp);
            0.5 * (w[4] + w[5])
        })
        .collect();
    ConvergenceReport { errors, window_medians }
}
