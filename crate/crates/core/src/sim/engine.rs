//! Episode engine. Each replanning cycle runs as barrier-separated phases:
//! state reports, leader planning, per-UAV MPPI, execution and monitoring.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corridor::{generate_sfc, FormationSafeRegion, Polytope};
use crate::formation::{plan_formation_paths, FormationError, FormationShape, GuidancePathSet, PlanRequest};
use crate::mppi::{
    mppi_step, mutual_distance, propagate, shift_horizon, wrap_angle, ControlInput, CostContext, MppiParams,
    Trajectory, UavState,
};
use crate::wire::{
    decode_guidance, decode_state_report, decode_trajectory, encode_guidance, encode_state_report, encode_trajectory,
    GuidanceBroadcast, StateReport,
};
use crate::world::{
    build_edt, clearance_route, generate_scenario, lookahead_point, query_distance, DistanceField, OccupancyGrid,
    ScenarioSpec,
};
use crate::Vec3;

use super::bus::{Bus, PayloadKind};
use super::report::{time_average, EpisodeReport, Outcome, TraceRow};
use super::{formation_similarity, SimError, SwarmConfig};

/// Yaw-rate feedforward limit (rad/s) and time constant (s).
const YAW_RATE_LIMIT: f64 = 1.0;
const YAW_TIME_CONSTANT: f64 = 1.0;

#[derive(Debug, Clone)]
struct Agent {
    state: UavState,
    nominal: Vec<ControlInput>,
}

/// What one cycle produced, for callers that inspect the pipeline.
#[derive(Debug, Clone)]
pub struct CycleRecord {
    pub cycle: u64,
    pub time: f64,
    pub corridors: Vec<Polytope>,
    pub guidance: GuidanceBroadcast,
    /// False when the planner found no safe step and the swarm held.
    pub planned: bool,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleStatus {
    Running,
    Finished,
}

#[derive(Debug, Clone)]
struct Monitor {
    min_clearance: f64,
    min_mutual: f64,
    max_speed: f64,
    max_accel: f64,
    crashed: bool,
}

pub struct Episode {
    cfg: SwarmConfig,
    grid: OccupancyGrid,
    field: DistanceField,
    shape: FormationShape,
    goal: Vec3,
    route: Option<Vec<Vec3>>,
    agents: Vec<Agent>,
    /// Latest trajectory received from each UAV.
    shared: Vec<Trajectory>,
    bus: Bus,
    cycle: u64,
    time: f64,
    assignment: Vec<usize>,
    scale: f64,
    prev_direction: Option<Vec3>,
    monitor: Monitor,
    times: Vec<f64>,
    similarity: Vec<f64>,
    scales: Vec<f64>,
    trace: Vec<TraceRow>,
    hold_cycles: u64,
    backtrack_cycles: u64,
    kept_assignment_cycles: u64,
    guidance_violations: u64,
    reached: bool,
    finished: bool,
}

impl Episode {
    pub fn new(cfg: &SwarmConfig, scenario: &ScenarioSpec) -> Result<Self, SimError> {
        let grid = generate_scenario(scenario)?;
        let goal = cfg.goal_center.map(Vec3::from).unwrap_or_else(|| scenario.goal());
        Self::with_world(cfg, grid, scenario.start(), goal)
    }

    /// Starts the formation at scale `cfg.start_scale()` centered on `start`.
    pub fn with_world(cfg: &SwarmConfig, grid: OccupancyGrid, start: Vec3, goal: Vec3) -> Result<Self, SimError> {
        cfg.validate()?;
        let field = build_edt(&grid, cfg.d_cap)?;
        let shape = cfg.formation_shape()?;
        let route = if cfg.guide.enabled {
            clearance_route(&grid, &field, &start, &goal, &cfg.guide.route)
        } else {
            None
        };
        let scale = cfg.start_scale();
        let p = cfg.mppi.horizon_steps;
        let agents: Vec<Agent> = shape
            .offsets()
            .iter()
            .map(|d| Agent {
                state: UavState::at_rest(start + scale * d, 0.0),
                nominal: vec![ControlInput::default(); p],
            })
            .collect();
        let shared = agents
            .iter()
            .map(|a| Trajectory::hold(a.state, p, 0.0, cfg.mppi.dt))
            .collect();
        let mut ep = Self {
            cfg: cfg.clone(),
            grid,
            field,
            shape,
            goal,
            route,
            assignment: (0..agents.len()).collect(),
            agents,
            shared,
            bus: Bus::new(),
            cycle: 0,
            time: 0.0,
            scale,
            prev_direction: None,
            monitor: Monitor {
                min_clearance: f64::INFINITY,
                min_mutual: f64::INFINITY,
                max_speed: 0.0,
                max_accel: 0.0,
                crashed: false,
            },
            times: Vec::new(),
            similarity: Vec::new(),
            scales: Vec::new(),
            trace: Vec::new(),
            hold_cycles: 0,
            backtrack_cycles: 0,
            kept_assignment_cycles: 0,
            guidance_violations: 0,
            reached: false,
            finished: false,
        };
        ep.observe_states();
        Ok(ep)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn states(&self) -> Vec<UavState> {
        self.agents.iter().map(|a| a.state).collect()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.agents.iter().map(|a| a.state.p).collect()
    }

    pub fn field(&self) -> &DistanceField {
        &self.field
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Mean UAV position.
    pub fn formation_center(&self) -> Vec3 {
        self.positions().iter().sum::<Vec3>() / self.agents.len() as f64
    }

    /// Samples the metrics, checks termination, and unless finished runs one
    /// replanning cycle.
    pub fn step_cycle(&mut self) -> Result<(CycleStatus, Option<CycleRecord>), SimError> {
        if self.finished {
            return Ok((CycleStatus::Finished, None));
        }
        self.sample_metrics()?;
        self.reached = (self.formation_center() - self.goal).norm() <= self.cfg.goal_tolerance;
        if self.reached || self.monitor.crashed || self.time >= self.cfg.episode_timeout - 1e-9 {
            self.finished = true;
            return Ok((CycleStatus::Finished, None));
        }
        let record = self.run_cycle()?;
        if self.monitor.crashed {
            self.sample_metrics()?;
            self.finished = true;
            return Ok((CycleStatus::Finished, Some(record)));
        }
        Ok((CycleStatus::Running, Some(record)))
    }

    pub fn run(mut self) -> Result<EpisodeReport, SimError> {
        while self.step_cycle()?.0 == CycleStatus::Running {}
        Ok(self.into_report())
    }

    fn sample_metrics(&mut self) -> Result<(), SimError> {
        let n = self.agents.len();
        let mut by_slot = vec![Vec3::zeros(); n];
        for (uav, &slot) in self.assignment.iter().enumerate() {
            by_slot[slot] = self.agents[uav].state.p;
        }
        let f = formation_similarity(&by_slot, self.shape.offsets())?;
        self.times.push(self.time);
        self.similarity.push(f);
        self.scales.push(self.scale);
        for (uav, a) in self.agents.iter().enumerate() {
            self.trace.push(TraceRow {
                time: self.time,
                uav,
                position: a.state.p,
                velocity: a.state.v,
                similarity: f,
                d_obs: query_distance(&self.field, &a.state.p),
                scale: self.scale,
            });
        }
        Ok(())
    }

    fn cycle_seeds(&self) -> (u64, Vec<u64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.master_seed);
        rng.set_stream(self.cycle);
        let planner = rng.next_u64();
        (planner, (0..self.agents.len()).map(|_| rng.next_u64()).collect())
    }

    fn run_cycle(&mut self) -> Result<CycleRecord, SimError> {
        let n = self.agents.len();
        let p = self.cfg.mppi.horizon_steps;
        let dt = self.cfg.mppi.dt;
        let (planner_seed, uav_seeds) = self.cycle_seeds();

        // Every UAV reports its position, obstacle distance and corridor.
        for (id, a) in self.agents.iter().enumerate() {
            let pos = a.state.p;
            let corridor = generate_sfc(&pos, &self.grid, &self.cfg.sfc)?;
            let msg = StateReport {
                position: pos,
                d_obs: query_distance(&self.field, &pos),
                corridor,
            };
            self.bus.send(id, self.cycle, PayloadKind::StateReport, encode_state_report(&msg));
        }

        // Leader (UAV 0) plans for everyone.
        let reports = self
            .bus
            .take(PayloadKind::StateReport)
            .iter()
            .map(|m| decode_state_report(&m.bytes))
            .collect::<Result<Vec<_>, _>>()?;
        let positions: Vec<Vec3> = reports.iter().map(|r| r.position).collect();
        let d_obs: Vec<f64> = reports.iter().map(|r| r.d_obs).collect();
        let region = FormationSafeRegion::new(reports.into_iter().map(|r| r.corridor).collect());
        // The shape is centered, so the centroid is the least-squares
        // formation center.
        let start_center = positions.iter().sum::<Vec3>() / n as f64;
        let sample = crate::formation::SampleParams {
            seed: planner_seed,
            ..self.cfg.sample.clone()
        };
        let request = PlanRequest {
            start_center,
            start_scale: self.scale,
            region: &region,
            assignment: &self.assignment,
            positions: &positions,
            d_obs: &d_obs,
            goal_center: self.route.as_ref().map_or(self.goal, |r| {
                lookahead_point(r, &start_center, self.cfg.guide.lookahead)
            }),
            shape: &self.shape,
            prev_direction: self.prev_direction,
            assignment_epsilon: self.cfg.assignment_epsilon,
        };
        let (broadcast, planned) = match plan_formation_paths(&request, &sample, &self.cfg.front) {
            Ok(out) => {
                let first = &out.sequence.configs[0];
                self.scale = first.scale;
                let step = first.center - start_center;
                if step.norm_squared() > 0.0 {
                    self.prev_direction = Some(step);
                }
                self.kept_assignment_cycles += out.kept_previous_assignment as u64;
                self.backtrack_cycles += out.backtracked as u64;
                (
                    GuidanceBroadcast {
                        assignment: out.assignment.perm,
                        paths: out.paths,
                    },
                    true,
                )
            }
            Err(FormationError::NoSafeStep) => {
                self.hold_cycles += 1;
                (
                    GuidanceBroadcast {
                        assignment: self.assignment.clone(),
                        paths: GuidancePathSet::hold(&positions, p),
                    },
                    false,
                )
            }
            Err(e) => return Err(e.into()),
        };
        self.bus.send(0, self.cycle, PayloadKind::GuidanceBroadcast, encode_guidance(&broadcast));

        let received = self.bus.take(PayloadKind::GuidanceBroadcast);
        let guidance = decode_guidance(&received[0].bytes)?;
        for (uav, path) in guidance.paths.paths.iter().enumerate() {
            let poly = region.get(uav);
            self.guidance_violations += path.iter().filter(|wp| !poly.contains(wp)).count() as u64;
        }
        self.assignment = guidance.assignment.clone();

        // Per-UAV trajectory optimization against last cycle's neighbor
        // trajectories.
        let mut optimal = Vec::with_capacity(n);
        for id in 0..n {
            let neighbors: Vec<Vec<Vec3>> = (0..n)
                .filter(|&j| j != id)
                .map(|j| {
                    (0..p)
                        .map(|k| self.shared[j].position_at(self.time + (k + 1) as f64 * dt))
                        .collect()
                })
                .collect();
            let waypoints = guidance.paths.path(id);
            let agent = &mut self.agents[id];
            set_yaw_feedforward(&mut agent.nominal, &agent.state, waypoints);
            let ctx = CostContext {
                waypoints,
                field: &self.field,
                neighbors: &neighbors,
                params: &self.cfg.running,
                dt,
            };
            let params = MppiParams {
                seed: uav_seeds[id],
                ..self.cfg.mppi.clone()
            };
            let out = mppi_step(&agent.state, &agent.nominal, &ctx, &params, self.time)?;
            self.bus.send(id, self.cycle, PayloadKind::TrajectoryShare, encode_trajectory(&out.trajectory));
            optimal.push(out.optimal);
        }
        for msg in self.bus.take(PayloadKind::TrajectoryShare) {
            self.shared[msg.sender] = decode_trajectory(&msg.bytes)?;
        }

        // Execute the first replanning period.
        let k = self.cfg.steps_per_cycle();
        for s in 0..k {
            for (agent, u) in self.agents.iter_mut().zip(&optimal) {
                agent.state = propagate(&agent.state, &u[s], dt);
            }
            self.observe_states();
            if self.monitor.crashed {
                break;
            }
        }
        for (agent, u) in self.agents.iter_mut().zip(optimal) {
            let mut next = u;
            for _ in 0..k {
                next = shift_horizon(&next, ControlInput::default());
            }
            agent.nominal = next;
        }

        let record = CycleRecord {
            cycle: self.cycle,
            time: self.time,
            corridors: region.polytopes().to_vec(),
            guidance,
            planned,
            scale: self.scale,
        };
        self.cycle += 1;
        self.time = self.cycle as f64 * self.cfg.replan_period;
        Ok(record)
    }

    fn observe_states(&mut self) {
        let lambda = self.cfg.running.downwash_lambda;
        let m = &mut self.monitor;
        for (i, a) in self.agents.iter().enumerate() {
            let s = &a.state;
            if !s.is_finite() || self.grid.occupied_at(&s.p) != Some(false) {
                m.crashed = true;
                m.min_clearance = 0.0;
            } else {
                m.min_clearance = m.min_clearance.min(query_distance(&self.field, &s.p));
            }
            m.max_speed = m.max_speed.max(s.v.norm());
            m.max_accel = m.max_accel.max(s.a.norm());
            for b in &self.agents[i + 1..] {
                m.min_mutual = m.min_mutual.min(mutual_distance(&s.p, &b.state.p, lambda));
            }
        }
    }

    pub fn into_report(self) -> EpisodeReport {
        let avg = time_average(&self.times, &self.similarity);
        let max = self.similarity.iter().copied().fold(0.0, f64::max);
        let (min_idx, min_scale) = self
            .scales
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, s)| if s < b.1 { (i, s) } else { b });
        let max_after = self.scales[min_idx..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = &self.monitor;
        let r = self.cfg.uav_radius;
        let outcome = if m.crashed {
            Outcome::Crashed
        } else if !self.reached {
            Outcome::Timeout
        } else if m.min_clearance < r {
            Outcome::ObstacleCollision
        } else if m.min_mutual < 2.0 * r {
            Outcome::MutualCollision
        } else if !(max < self.cfg.distortion_threshold) {
            Outcome::Distortion
        } else {
            Outcome::Success
        };
        EpisodeReport {
            success: outcome == Outcome::Success,
            outcome,
            reached_goal: self.reached,
            avg_similarity: avg,
            max_similarity: max,
            min_obstacle_clearance: m.min_clearance,
            min_mutual_distance: m.min_mutual,
            completion_time: self.time,
            max_speed: m.max_speed,
            max_acceleration: m.max_accel,
            min_scale,
            max_scale_after_min: max_after,
            final_scale: self.scale,
            cycles: self.cycle,
            hold_cycles: self.hold_cycles,
            backtrack_cycles: self.backtrack_cycles,
            kept_assignment_cycles: self.kept_assignment_cycles,
            guidance_violations: self.guidance_violations,
            bytes_on_bus: self.bus.bytes_sent() as u64,
            trace: self.trace,
        }
    }
}

/// Points yaw along the horizontal direction of the guidance path.
fn set_yaw_feedforward(nominal: &mut [ControlInput], x: &UavState, waypoints: &[Vec3]) {
    let ahead = waypoints[waypoints.len() - 1] - x.p;
    let rate = if ahead.xy().norm() > 0.05 {
        let err = wrap_angle(ahead.y.atan2(ahead.x) - x.psi);
        (err / YAW_TIME_CONSTANT).clamp(-YAW_RATE_LIMIT, YAW_RATE_LIMIT)
    } else {
        0.0
    };
    for u in nominal {
        u.psi_rate = rate;
    }
}

pub fn run_episode(cfg: &SwarmConfig, scenario: &ScenarioSpec) -> Result<EpisodeReport, SimError> {
    Episode::new(cfg, scenario)?.run()
}
