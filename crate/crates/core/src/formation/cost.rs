use serde::{Deserialize, Serialize};

use crate::corridor::FormationSafeRegion;
use crate::Vec3;

use super::{FormationConfig, FormationError};

/// Weights of the per-configuration evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontWeights {
    pub k_goal: f64,
    pub k_scale: f64,
    pub k_safe: f64,
    pub k_scale_continuity: f64,
    pub k_angle_continuity: f64,
    /// UAVs closer than this to an obstacle get zero risk weight (m).
    pub d_risk: f64,
    pub s_des: f64,
    /// Charged per remaining step when a sequence halts early.
    pub suspend_penalty_per_step: f64,
}

impl Default for FrontWeights {
    fn default() -> Self {
        Self {
            k_goal: 2.0,
            k_scale: 1.0,
            k_safe: 1e6,
            k_scale_continuity: 1.0,
            k_angle_continuity: 0.5,
            d_risk: 0.6,
            s_des: 1.0,
            suspend_penalty_per_step: 500.0,
        }
    }
}

impl FrontWeights {
    pub fn validate(&self, s_min: f64, s_max: f64) -> Result<(), FormationError> {
        let weights = [
            self.k_goal,
            self.k_scale,
            self.k_safe,
            self.k_scale_continuity,
            self.k_angle_continuity,
            self.d_risk,
            self.suspend_penalty_per_step,
        ];
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(FormationError::InvalidParams("front weights must be non-negative".into()));
        }
        if !(s_min <= self.s_des && self.s_des <= s_max) {
            return Err(FormationError::InvalidParams("s_des must lie in [s_min, s_max]".into()));
        }
        Ok(())
    }
}

/// The configuration that precedes the one under evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrevStep {
    pub center: Vec3,
    pub scale: f64,
    /// Direction of the segment that led into `center`, if known.
    pub direction: Option<Vec3>,
}

/// Everything a configuration is scored against.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub goal_center: Vec3,
    pub region: &'a FormationSafeRegion,
    pub previous: Option<PrevStep>,
    /// Current UAV positions, by UAV id.
    pub positions: &'a [Vec3],
    /// Obstacle distance at each UAV, by UAV id.
    pub d_obs: &'a [f64],
    /// UAV id -> slot, held fixed while scoring.
    pub assignment: &'a [usize],
    pub weights: &'a FrontWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FcCost {
    pub goal: f64,
    pub scale: f64,
    pub safe: f64,
    pub risk: f64,
    pub continuity: f64,
    /// UAVs whose assigned target falls outside their corridor.
    pub unsafe_targets: usize,
}

impl FcCost {
    pub fn total(&self) -> f64 {
        self.goal + self.scale + self.safe + self.risk + self.continuity
    }

    /// All assigned targets inside their corridors.
    pub fn is_safe(&self) -> bool {
        self.unsafe_targets == 0
    }
}

/// Angle between two directions, `0` if either is degenerate.
pub fn turn_angle(a: &Vec3, b: &Vec3) -> f64 {
    if a.norm_squared() == 0.0 || b.norm_squared() == 0.0 {
        return 0.0;
    }
    a.cross(b).norm().atan2(a.dot(b))
}

pub fn evaluate_fc(fc: &FormationConfig, ctx: &EvalContext<'_>) -> FcCost {
    let w = ctx.weights;
    let goal = w.k_goal * (fc.center - ctx.goal_center).norm();
    let scale = w.k_scale * (fc.scale - w.s_des).abs();

    let mut unsafe_targets = 0;
    for (uav, poly) in ctx.region.polytopes().iter().enumerate() {
        if !poly.contains(&fc.target(ctx.assignment[uav])) {
            unsafe_targets += 1;
        }
    }
    let safe = w.k_safe * unsafe_targets as f64;

    let d_total: f64 = ctx.d_obs.iter().sum();
    let mut risk = 0.0;
    if d_total > 0.0 {
        for (uav, (&d, p)) in ctx.d_obs.iter().zip(ctx.positions).enumerate() {
            if d > w.d_risk {
                risk += d / d_total * (fc.target(ctx.assignment[uav]) - p).norm();
            }
        }
    }

    let continuity = match ctx.previous {
        None => 0.0,
        Some(prev) => {
            let angle = prev
                .direction
                .map(|d| turn_angle(&(fc.center - prev.center), &d))
                .unwrap_or(0.0);
            w.k_scale_continuity * (fc.scale - prev.scale).abs() + w.k_angle_continuity * angle
        }
    };

    FcCost {
        goal,
        scale,
        safe,
        risk,
        continuity,
        unsafe_targets,
    }
}
