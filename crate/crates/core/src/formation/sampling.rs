use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::Vec3;

use super::FormationError;

/// Sampling of formation-configuration sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleParams {
    /// Minimal propagation radius (m); each step travels `(1 + gamma) * r_min`.
    pub r_min: f64,
    /// `gamma` is drawn uniformly from `[0, gamma_max]`.
    pub gamma_max: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub scale_samples: usize,
    /// Number of sampled sequences (T_F).
    pub sequences: usize,
    /// Propagation steps per sequence (T_S); equals the MPPI horizon.
    pub steps: usize,
    pub seed: u64,
    /// When the best sequence completes fewer than this many steps, a second
    /// batch is drawn with every step over the whole sphere and both batches
    /// compete. Zero disables the fallback.
    pub backtrack_below: usize,
    /// Keep steps in the horizontal plane through `prev`.
    pub planar: bool,
}

impl Default for SampleParams {
    fn default() -> Self {
        Self {
            r_min: 0.15,
            gamma_max: 1.0,
            s_min: 0.4,
            s_max: 1.3,
            scale_samples: 7,
            sequences: 64,
            steps: 20,
            seed: 0,
            backtrack_below: 1,
            planar: false,
        }
    }
}

impl SampleParams {
    pub fn validate(&self) -> Result<(), FormationError> {
        let ok = self.r_min > 0.0
            && (0.0..=1.0).contains(&self.gamma_max)
            && self.s_min > 0.0
            && self.s_min <= self.s_max
            && self.scale_samples >= 1
            && self.sequences >= 1
            && self.steps >= 1;
        if ok {
            Ok(())
        } else {
            Err(FormationError::InvalidParams("sample parameters out of range".into()))
        }
    }

    /// The uniform scale grid spanning `[s_min, s_max]`.
    pub fn scale_grid(&self) -> Vec<f64> {
        let n = self.scale_samples;
        if n == 1 {
            return vec![self.s_min];
        }
        let step = (self.s_max - self.s_min) / (n - 1) as f64;
        (0..n)
            .map(|k| if k + 1 == n { self.s_max } else { self.s_min + k as f64 * step })
            .collect()
    }
}

/// Next formation center: a point on the forward hemisphere of radius
/// `(1 + gamma) * r_min` around `prev`, oriented towards `goal`.
///
/// Directions are uniform over the hemisphere surface. When the goal is no
/// farther than the drawn radius the goal itself is returned, so sequences
/// settle on the goal instead of orbiting it.
pub fn sample_center<R: Rng + ?Sized>(prev: &Vec3, goal: &Vec3, params: &SampleParams, rng: &mut R) -> Vec3 {
    sample_step(prev, goal, params, true, rng)
}

/// [`sample_center`], optionally without the forward restriction.
pub fn sample_step<R: Rng + ?Sized>(
    prev: &Vec3,
    goal: &Vec3,
    params: &SampleParams,
    forward: bool,
    rng: &mut R,
) -> Vec3 {
    let axis = goal - prev;
    let dist = axis.norm();
    if dist == 0.0 {
        return *goal;
    }
    let gamma: f64 = rng.random::<f64>() * params.gamma_max;
    let radius = (1.0 + gamma) * params.r_min;
    if dist <= radius {
        return *goal;
    }
    let dir = loop {
        let x = rng.sample(StandardNormal);
        let y = rng.sample(StandardNormal);
        let z = if params.planar { 0.0 } else { rng.sample(StandardNormal) };
        let v = Vec3::new(x, y, z);
        let n = v.norm();
        if n > 1e-12 {
            break v / n;
        }
    };
    let dir = if forward && dir.dot(&axis) < 0.0 { -dir } else { dir };
    prev + radius * dir
}
