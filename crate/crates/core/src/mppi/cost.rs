use serde::{Deserialize, Serialize};

use crate::world::DistanceField;
use crate::Vec3;

use super::{ControlInput, MppiError, UavState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunningCostParams {
    pub k_f: f64,
    pub k_dyn: f64,
    pub v_max: f64,
    pub a_max: f64,
    pub k_smo: f64,
    pub k_obs: f64,
    pub beta: f64,
    pub d_obs_min: f64,
    pub d_obs_max: f64,
    pub k_mut: f64,
    pub alpha: f64,
    pub d_mut_min: f64,
    pub d_mut_max: f64,
    /// Vertical shrink of the mutual distance, `Gamma = diag(1, 1, lambda)`.
    pub downwash_lambda: f64,
}

impl Default for RunningCostParams {
    fn default() -> Self {
        Self {
            k_f: 4.0,
            k_dyn: 1e3,
            v_max: 1.5,
            a_max: 3.0,
            k_smo: 0.05,
            k_obs: 1e3,
            beta: 2.0,
            d_obs_min: 0.3,
            d_obs_max: 1.2,
            k_mut: 1e3,
            alpha: 2.0,
            d_mut_min: 0.6,
            d_mut_max: 1.5,
            downwash_lambda: 0.25,
        }
    }
}

impl RunningCostParams {
    pub fn validate(&self) -> Result<(), MppiError> {
        let weights = [self.k_f, self.k_dyn, self.k_smo, self.k_obs, self.beta, self.k_mut, self.alpha];
        let ok = weights.iter().all(|w| *w >= 0.0)
            && self.v_max > 0.0
            && self.a_max > 0.0
            && 0.0 <= self.d_obs_min
            && self.d_obs_min < self.d_obs_max
            && 0.0 <= self.d_mut_min
            && self.d_mut_min < self.d_mut_max
            && self.downwash_lambda > 0.0
            && self.downwash_lambda < 1.0;
        if ok {
            Ok(())
        } else {
            Err(MppiError::InvalidParams("running cost parameters out of range".into()))
        }
    }
}

/// Read-only inputs shared by every rollout of one optimization.
#[derive(Debug, Clone, Copy)]
pub struct CostContext<'a> {
    /// Guidance waypoints, one per horizon step.
    pub waypoints: &'a [Vec3],
    pub field: &'a DistanceField,
    /// `neighbors[j][k]`: neighbor `j`'s position at the time of horizon
    /// state `k + 1`.
    pub neighbors: &'a [Vec<Vec3>],
    pub params: &'a RunningCostParams,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunningCost {
    pub guidance: f64,
    pub dynamics: f64,
    pub smoothness: f64,
    pub obstacle: f64,
    pub mutual: f64,
}

impl RunningCost {
    pub fn total(&self) -> f64 {
        self.guidance + self.dynamics + self.smoothness + self.obstacle + self.mutual
    }
}

/// Zero above `hi`, `k` below `lo`, `k * ((hi - d) / (hi - lo))^exp` between.
#[inline]
pub fn barrier(d: f64, lo: f64, hi: f64, k: f64, exp: f64) -> f64 {
    if d < lo {
        k
    } else if d <= hi {
        k * ((hi - d) / (hi - lo)).powf(exp)
    } else {
        0.0
    }
}

/// Downwash-scaled distance `||diag(1, 1, lambda) (a - b)||`.
#[inline]
pub fn mutual_distance(a: &Vec3, b: &Vec3, downwash_lambda: f64) -> f64 {
    let d = a - b;
    (d.x * d.x + d.y * d.y + downwash_lambda * downwash_lambda * d.z * d.z).sqrt()
}

/// Fires when `sign(|v| - v_max) + sign(|a| - a_max) >= 0`.
#[inline]
pub fn dynamics_violated(x: &UavState, v_max: f64, a_max: f64) -> bool {
    fn sign(x: f64) -> i32 {
        (x > 0.0) as i32 - (x < 0.0) as i32
    }
    sign(x.v.norm() - v_max) + sign(x.a.norm() - a_max) >= 0
}

/// Running cost of the state reached at horizon step `k` under control `u`.
pub fn running_cost_terms(x: &UavState, u: &ControlInput, k: usize, ctx: &CostContext<'_>) -> RunningCost {
    let p = ctx.params;
    let guidance = p.k_f * (x.p - ctx.waypoints[k]).norm();
    let dynamics = if dynamics_violated(x, p.v_max, p.a_max) { p.k_dyn } else { 0.0 };
    let smoothness = p.k_smo * u.norm_squared() * ctx.dt;
    let d_obs = ctx.field.query(&x.p);
    let obstacle = barrier(d_obs, p.d_obs_min, p.d_obs_max, p.k_obs, p.beta);
    let mutual = ctx
        .neighbors
        .iter()
        .map(|track| {
            let d = mutual_distance(&x.p, &track[k], p.downwash_lambda);
            barrier(d, p.d_mut_min, p.d_mut_max, p.k_mut, p.alpha)
        })
        .sum();
    RunningCost {
        guidance,
        dynamics,
        smoothness,
        obstacle,
        mutual,
    }
}

#[inline]
pub fn running_cost(x: &UavState, u: &ControlInput, k: usize, ctx: &CostContext<'_>) -> f64 {
    running_cost_terms(x, u, k, ctx).total()
}
