use serde::{Deserialize, Serialize};

use crate::corridor::SfcParams;
use crate::formation::{FormationShape, FrontWeights, SampleParams};
use crate::mppi::{MppiParams, RunningCostParams};
use crate::world::RouteParams;
use crate::Vec3;

use super::SimError;

/// Everything about the swarm and its planners; the world comes from a
/// separate [`ScenarioSpec`](crate::world::ScenarioSpec).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwarmConfig {
    pub n_uavs: usize,
    /// Desired relative positions, one per slot, centroid at the origin.
    pub shape: Vec<[f64; 3]>,
    /// Formation center to reach; the scenario goal when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goal_center: Option<[f64; 3]>,
    /// Initial formation scale; `front.s_des` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_scale: Option<f64>,
    pub replan_period: f64,
    pub episode_timeout: f64,
    pub uav_radius: f64,
    /// Formation-center distance to the goal that ends an episode.
    pub goal_tolerance: f64,
    /// Episodes whose peak similarity error reaches this are failures.
    pub distortion_threshold: f64,
    pub d_cap: f64,
    pub assignment_epsilon: f64,
    pub master_seed: u64,
    pub sfc: SfcParams,
    pub sample: SampleParams,
    pub front: FrontWeights,
    pub mppi: MppiParams,
    pub running: RunningCostParams,
    pub guide: GuideParams,
}

/// Optional routing aid for the guidance planner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GuideParams {
    /// Aim the planner at a point `lookahead` m along a route computed once
    /// per episode instead of at the goal itself. Without a route the
    /// planner aims at the goal.
    pub enabled: bool,
    pub lookahead: f64,
    pub route: RouteParams,
}

impl Default for GuideParams {
    fn default() -> Self {
        Self {
            enabled: false,
            lookahead: 2.0,
            route: RouteParams::default(),
        }
    }
}

impl Default for SwarmConfig {
    fn default() -> Self {
        let shape = FormationShape::triangle6(1.6);
        Self {
            n_uavs: 6,
            shape: shape.offsets().iter().map(|p| [p.x, p.y, p.z]).collect(),
            goal_center: None,
            start_scale: None,
            replan_period: 0.2,
            episode_timeout: 120.0,
            uav_radius: 0.15,
            goal_tolerance: 0.5,
            distortion_threshold: 0.5,
            d_cap: 5.0,
            assignment_epsilon: 1e-4,
            master_seed: 0,
            sfc: SfcParams::default(),
            sample: SampleParams::default(),
            front: FrontWeights::default(),
            mppi: MppiParams::default(),
            running: RunningCostParams::default(),
            guide: GuideParams::default(),
        }
    }
}

impl SwarmConfig {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        let cfg: Self = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("swarm config always serializes")
    }

    pub fn formation_shape(&self) -> Result<FormationShape, SimError> {
        FormationShape::new(self.shape.iter().map(|p| Vec3::from(*p)).collect()).map_err(SimError::from)
    }

    pub fn start_scale(&self) -> f64 {
        self.start_scale.unwrap_or(self.front.s_des)
    }

    /// Control intervals executed per replanning cycle.
    pub fn steps_per_cycle(&self) -> usize {
        (self.replan_period / self.mppi.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::Config(msg));
        if self.n_uavs < 2 {
            return bad(format!("n_uavs must be at least 2, got {}", self.n_uavs));
        }
        if self.shape.len() != self.n_uavs {
            return bad(format!("shape has {} entries for {} UAVs", self.shape.len(), self.n_uavs));
        }
        let shape = self.formation_shape()?;
        let spread = shape.offsets().iter().map(|p| p.norm()).fold(0.0, f64::max);
        if shape.centroid().norm() > 1e-9 * spread.max(1.0) {
            return bad("shape centroid must be the origin".into());
        }
        if !(spread > 0.0) {
            return bad("shape must not be a single point".into());
        }
        self.sfc.validate().map_err(|e| SimError::Config(e.to_string()))?;
        self.sample.validate()?;
        self.front.validate(self.sample.s_min, self.sample.s_max)?;
        self.mppi.validate()?;
        self.running.validate()?;
        self.guide.route.validate()?;
        if !(self.guide.lookahead > 0.0) {
            return bad("guide.lookahead must be positive".into());
        }
        if self.sample.steps != self.mppi.horizon_steps {
            return bad(format!(
                "sample.steps ({}) must equal mppi.horizon_steps ({})",
                self.sample.steps, self.mppi.horizon_steps
            ));
        }
        let k = self.replan_period / self.mppi.dt;
        if !(k >= 1.0) || (k - k.round()).abs() > 1e-9 || k.round() as usize > self.mppi.horizon_steps {
            return bad("replan_period must be a whole number of mppi.dt within the horizon".into());
        }
        let s = self.start_scale();
        if !(self.sample.s_min <= s && s <= self.sample.s_max) {
            return bad("start_scale must lie in [s_min, s_max]".into());
        }
        let positive = [
            ("episode_timeout", self.episode_timeout),
            ("uav_radius", self.uav_radius),
            ("goal_tolerance", self.goal_tolerance),
            ("distortion_threshold", self.distortion_threshold),
            ("d_cap", self.d_cap),
            ("assignment_epsilon", self.assignment_epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive"));
            }
        }
        Ok(())
    }
}
