//! Straight-line recodings of the formation evaluation and MPPI running
//! cost, plus generators of randomized inputs for both.

use rand::Rng;
use swarmform_core::corridor::{FormationSafeRegion, Polytope};
use swarmform_core::formation::{EvalContext, FormationConfig, FormationShape, FrontWeights, PrevStep};
use swarmform_core::mppi::{ControlInput, CostContext, RunningCostParams, UavState};
use swarmform_core::world::DistanceField;
use swarmform_core::Vec3;

fn norm3(x: f64, y: f64, z: f64) -> f64 {
    (x * x + y * y + z * z).sqrt()
}

pub struct FrontCase {
    pub fc: FormationConfig,
    pub goal: Vec3,
    pub region: FormationSafeRegion,
    pub previous: Option<PrevStep>,
    pub positions: Vec<Vec3>,
    pub d_obs: Vec<f64>,
    pub assignment: Vec<usize>,
    pub weights: FrontWeights,
}

impl FrontCase {
    pub fn context(&self) -> EvalContext<'_> {
        EvalContext {
            goal_center: self.goal,
            region: &self.region,
            previous: self.previous,
            positions: &self.positions,
            d_obs: &self.d_obs,
            assignment: &self.assignment,
            weights: &self.weights,
        }
    }
}

fn rand_vec<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Vec3 {
    Vec3::new(rng.random_range(lo..hi), rng.random_range(lo..hi), rng.random_range(lo..hi))
}

fn shuffled<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

pub fn random_front_case<R: Rng>(rng: &mut R) -> FrontCase {
    let n = rng.random_range(2..=8);
    let shape = FormationShape::new((0..n).map(|_| rand_vec(rng, -2.0, 2.0)).collect()).unwrap();
    let fc = FormationConfig::new(rng.random_range(0.4..1.3), rand_vec(rng, -5.0, 5.0), shape);
    let assignment = shuffled(rng, n);
    let polytopes = (0..n)
        .map(|uav| {
            // Boxes near the assigned target, sometimes missing it, plus one
            // tilted face.
            let seed = fc.target(assignment[uav]) + rand_vec(rng, -0.8, 0.8);
            let half = rand_vec(rng, 0.2, 1.5);
            let mut normals = vec![Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()];
            let mut offsets: Vec<f64> = (0..3)
                .flat_map(|k| [seed[k] + half[k], -(seed[k] - half[k])])
                .collect();
            let tilt = rand_vec(rng, -1.0, 1.0).normalize();
            normals.push(tilt);
            offsets.push(tilt.dot(&seed) + rng.random_range(0.05..1.0));
            Polytope::new(normals, offsets, seed).unwrap()
        })
        .collect();
    let weights = FrontWeights {
        k_goal: rng.random_range(0.0..5.0),
        k_scale: rng.random_range(0.0..5.0),
        k_safe: rng.random_range(1.0..1e6),
        k_scale_continuity: rng.random_range(0.0..5.0),
        k_angle_continuity: rng.random_range(0.0..5.0),
        d_risk: rng.random_range(0.0..1.0),
        s_des: rng.random_range(0.4..1.3),
        suspend_penalty_per_step: 0.0,
    };
    let previous = rng.random_bool(0.8).then(|| PrevStep {
        center: fc.center + rand_vec(rng, -0.3, 0.3),
        scale: rng.random_range(0.4..1.3),
        direction: rng.random_bool(0.8).then(|| rand_vec(rng, -1.0, 1.0)),
    });
    FrontCase {
        goal: rand_vec(rng, -20.0, 20.0),
        region: FormationSafeRegion::new(polytopes),
        previous,
        positions: (0..n).map(|i| fc.target(i) + rand_vec(rng, -1.0, 1.0)).collect(),
        d_obs: (0..n).map(|_| rng.random_range(0.0..2.0)).collect(),
        assignment,
        weights,
        fc,
    }
}

/// Goal, scale, corridor, risk and continuity terms summed in plain scalar
/// arithmetic.
pub fn front_cost_reference(case: &FrontCase) -> f64 {
    let w = &case.weights;
    let c = case.fc.center;
    let s = case.fc.scale;
    let shape = case.fc.shape.offsets();
    let target = |slot: usize| {
        let d = shape[slot];
        [c.x + s * d.x, c.y + s * d.y, c.z + s * d.z]
    };

    let goal = w.k_goal * norm3(c.x - case.goal.x, c.y - case.goal.y, c.z - case.goal.z);
    let scale = w.k_scale * (s - w.s_des).abs();

    let mut outside = 0usize;
    for (uav, poly) in case.region.polytopes().iter().enumerate() {
        let t = target(case.assignment[uav]);
        let mut inside = true;
        for (n, b) in poly.normals().iter().zip(poly.offsets()) {
            if n.x * t[0] + n.y * t[1] + n.z * t[2] > b + 1e-9 {
                inside = false;
            }
        }
        if !inside {
            outside += 1;
        }
    }
    let safe = w.k_safe * outside as f64;

    let mut total_d = 0.0;
    for d in &case.d_obs {
        total_d += d;
    }
    let mut risk = 0.0;
    for uav in 0..case.positions.len() {
        let d = case.d_obs[uav];
        if d > w.d_risk && total_d > 0.0 {
            let t = target(case.assignment[uav]);
            let p = case.positions[uav];
            risk += d / total_d * norm3(t[0] - p.x, t[1] - p.y, t[2] - p.z);
        }
    }

    let mut continuity = 0.0;
    if let Some(prev) = case.previous {
        continuity += w.k_scale_continuity * (s - prev.scale).abs();
        if let Some(dir) = prev.direction {
            let a = [c.x - prev.center.x, c.y - prev.center.y, c.z - prev.center.z];
            let b = [dir.x, dir.y, dir.z];
            let a_len = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
            let b_len = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
            if a_len > 0.0 && b_len > 0.0 {
                let cross = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                let sin = norm3(cross[0], cross[1], cross[2]);
                let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                continuity += w.k_angle_continuity * sin.atan2(cos);
            }
        }
    }
    goal + scale + safe + risk + continuity
}

pub struct RunningCase {
    pub x: UavState,
    pub u: ControlInput,
    pub k: usize,
    pub waypoints: Vec<Vec3>,
    pub neighbors: Vec<Vec<Vec3>>,
    pub params: RunningCostParams,
    pub dt: f64,
}

impl RunningCase {
    pub fn context<'a>(&'a self, field: &'a DistanceField) -> CostContext<'a> {
        CostContext {
            waypoints: &self.waypoints,
            field,
            neighbors: &self.neighbors,
            params: &self.params,
            dt: self.dt,
        }
    }
}

/// Random state inside `field`, with speeds and accelerations straddling
/// their limits and neighbors close enough to hit every mutual branch.
pub fn random_running_case<R: Rng>(rng: &mut R, field: &DistanceField) -> RunningCase {
    let dims = field.dims();
    let r = field.resolution();
    let lo = field.origin();
    let span = Vec3::new(dims[0] as f64 * r, dims[1] as f64 * r, dims[2] as f64 * r);
    let p = lo + Vec3::new(
        rng.random::<f64>() * span.x,
        rng.random::<f64>() * span.y,
        rng.random::<f64>() * span.z,
    );
    let d_obs_min = rng.random_range(0.05..0.6);
    let d_mut_min = rng.random_range(0.1..0.8);
    let params = RunningCostParams {
        k_f: rng.random_range(0.0..10.0),
        k_dyn: rng.random_range(0.0..2e3),
        v_max: rng.random_range(0.5..2.0),
        a_max: rng.random_range(1.0..4.0),
        k_smo: rng.random_range(0.0..1.0),
        k_obs: rng.random_range(0.0..2e3),
        beta: rng.random_range(0.5..3.0),
        d_obs_min,
        d_obs_max: d_obs_min + rng.random_range(0.1..1.5),
        k_mut: rng.random_range(0.0..2e3),
        alpha: rng.random_range(0.5..3.0),
        d_mut_min,
        d_mut_max: d_mut_min + rng.random_range(0.1..1.5),
        downwash_lambda: rng.random_range(0.05..0.95),
    };
    let horizon = rng.random_range(1..=20);
    let n_neighbors = rng.random_range(0..=5);
    RunningCase {
        x: UavState {
            p,
            v: rand_vec(rng, -1.6, 1.6),
            a: rand_vec(rng, -3.0, 3.0),
            psi: rng.random_range(-3.0..3.0),
        },
        u: ControlInput::new(rand_vec(rng, -5.0, 5.0), rng.random_range(-1.0..1.0)),
        k: rng.random_range(0..horizon),
        waypoints: (0..horizon).map(|_| p + rand_vec(rng, -2.0, 2.0)).collect(),
        neighbors: (0..n_neighbors)
            .map(|_| (0..horizon).map(|_| p + rand_vec(rng, -2.0, 2.0)).collect())
            .collect(),
        params,
        dt: rng.random_range(0.01..0.2),
    }
}

fn piecewise(d: f64, lo: f64, hi: f64, k: f64, exponent: f64) -> f64 {
    if d < lo {
        return k;
    }
    if d > hi {
        return 0.0;
    }
    k * ((hi - d) / (hi - lo)).powf(exponent)
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Guidance, dynamics, smoothness, obstacle and mutual terms. `d_obs` is the
/// obstacle distance at `case.x.p`.
pub fn running_cost_reference(case: &RunningCase, d_obs: f64) -> f64 {
    let q = &case.params;
    let p = case.x.p;
    let wp = case.waypoints[case.k];
    let guidance = q.k_f * norm3(p.x - wp.x, p.y - wp.y, p.z - wp.z);

    let speed = norm3(case.x.v.x, case.x.v.y, case.x.v.z);
    let accel = norm3(case.x.a.x, case.x.a.y, case.x.a.z);
    let d_dyn = sign(speed - q.v_max) + sign(accel - q.a_max);
    let dynamics = if d_dyn >= 0.0 { q.k_dyn } else { 0.0 };

    let j = case.u.jerk;
    let smooth = q.k_smo * (j.x * j.x + j.y * j.y + j.z * j.z + case.u.psi_rate * case.u.psi_rate) * case.dt;

    let obstacle = piecewise(d_obs, q.d_obs_min, q.d_obs_max, q.k_obs, q.beta);

    let mut mutual = 0.0;
    for track in &case.neighbors {
        let o = track[case.k];
        let dz = q.downwash_lambda * (p.z - o.z);
        let d = norm3(p.x - o.x, p.y - o.y, dz);
        mutual += piecewise(d, q.d_mut_min, q.d_mut_max, q.k_mut, q.alpha);
    }
    guidance + dynamics + smooth + obstacle + mutual
}
