//! One MPPI iteration: sample perturbed control sequences, score the
//! rollouts, fold them into an importance-weighted update.

use nalgebra::{Matrix4, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{propagate, running_cost, ControlInput, CostContext, MppiError, Trajectory, UavState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MppiParams {
    /// Softmax temperature.
    pub lambda_temp: f64,
    /// Covariance of the control perturbations, order `[jx, jy, jz, psi_rate]`.
    pub sigma: [[f64; 4]; 4],
    pub rollouts: usize,
    pub horizon_steps: usize,
    pub dt: f64,
    /// Quadratic control weight; the smoothness term of the running cost
    /// already charges `u^T u`, so this is informational.
    pub control_weight: [[f64; 4]; 4],
    pub seed: u64,
}

impl Default for MppiParams {
    fn default() -> Self {
        let diag = |d: [f64; 4]| {
            let mut m = [[0.0; 4]; 4];
            for k in 0..4 {
                m[k][k] = d[k];
            }
            m
        };
        Self {
            lambda_temp: 1.0,
            sigma: diag([4.0, 4.0, 4.0, 0.25]),
            rollouts: 1024,
            horizon_steps: 20,
            dt: 0.1,
            control_weight: diag([0.05; 4]),
            seed: 0,
        }
    }
}

impl MppiParams {
    pub fn validate(&self) -> Result<(), MppiError> {
        let bad = |s: &str| Err(MppiError::InvalidParams(s.into()));
        if !(self.lambda_temp > 0.0 && self.lambda_temp.is_finite()) {
            return bad("lambda_temp must be positive");
        }
        if self.rollouts == 0 || self.horizon_steps == 0 {
            return bad("rollouts and horizon_steps must be at least 1");
        }
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if spd_factor(&self.sigma).is_none() {
            return bad("sigma must be symmetric positive-definite");
        }
        if spd_factor(&self.control_weight).is_none() {
            return bad("control_weight must be symmetric positive-definite");
        }
        Ok(())
    }

    pub fn sigma_factor(&self) -> Result<Matrix4<f64>, MppiError> {
        spd_factor(&self.sigma).ok_or_else(|| MppiError::InvalidParams("sigma must be symmetric positive-definite".into()))
    }
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
fn spd_factor(m: &[[f64; 4]; 4]) -> Option<Matrix4<f64>> {
    let mat = Matrix4::from_fn(|i, j| m[i][j]);
    if mat != mat.transpose() || mat.iter().any(|x| !x.is_finite()) {
        return None;
    }
    mat.cholesky().map(|c| c.l())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MppiOutput {
    /// Optimal states under the updated controls.
    pub trajectory: Trajectory,
    /// Updated control sequence `u*` before shifting.
    pub optimal: Vec<ControlInput>,
    /// `u*` shifted one step with `u_init` appended: the next nominal.
    pub nominal: Vec<ControlInput>,
    pub weights: Vec<f64>,
    /// Rollout costs as seen by the weighting (after any cost hook).
    pub costs: Vec<f64>,
}

/// Drops the head of `nominal` and appends `u_init`.
pub fn shift_horizon(nominal: &[ControlInput], u_init: ControlInput) -> Vec<ControlInput> {
    let mut out = Vec::with_capacity(nominal.len());
    out.extend_from_slice(nominal.get(1..).unwrap_or(&[]));
    if !nominal.is_empty() {
        out.push(u_init);
    }
    out
}

/// Importance weights `exp(-(S_m - S_min) / lambda)`, normalized. Rollouts
/// with non-finite cost get weight 0; if none is finite all weights are 0.
pub fn importance_weights(costs: &[f64], lambda: f64) -> Vec<f64> {
    let s_min = costs.iter().copied().filter(|c| c.is_finite()).fold(f64::INFINITY, f64::min);
    if !s_min.is_finite() {
        return vec![0.0; costs.len()];
    }
    let raw: Vec<f64> = costs
        .iter()
        .map(|&s| if s.is_finite() { (-(s - s_min) / lambda).exp() } else { 0.0 })
        .collect();
    let norm: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / norm).collect()
}

pub fn mppi_step(
    x0: &UavState,
    nominal: &[ControlInput],
    ctx: &CostContext<'_>,
    params: &MppiParams,
    t0: f64,
) -> Result<MppiOutput, MppiError> {
    mppi_step_with_hook(x0, nominal, ctx, params, t0, |s| s)
}

/// [`mppi_step`] with `cost_hook` applied to every rollout cost before
/// weighting.
pub fn mppi_step_with_hook(
    x0: &UavState,
    nominal: &[ControlInput],
    ctx: &CostContext<'_>,
    params: &MppiParams,
    t0: f64,
    cost_hook: impl Fn(f64) -> f64 + Sync,
) -> Result<MppiOutput, MppiError> {
    params.validate()?;
    ctx.params.validate()?;
    let p = params.horizon_steps;
    if nominal.len() != p {
        return Err(MppiError::HorizonMismatch {
            expected: p,
            got: nominal.len(),
        });
    }
    if ctx.waypoints.len() != p {
        return Err(MppiError::HorizonMismatch {
            expected: p,
            got: ctx.waypoints.len(),
        });
    }
    if let Some(track) = ctx.neighbors.iter().find(|t| t.len() < p) {
        return Err(MppiError::HorizonMismatch {
            expected: p,
            got: track.len(),
        });
    }
    if (ctx.dt - params.dt).abs() > 0.0 {
        return Err(MppiError::InvalidParams("cost context dt differs from params.dt".into()));
    }

    // Noise is drawn sequentially so the result does not depend on how the
    // rollouts are scheduled.
    let l = params.sigma_factor()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let noise: Vec<ControlInput> = (0..params.rollouts * p)
        .map(|_| {
            let z = Vector4::from_fn(|_, _| StandardNormal.sample(&mut rng));
            let v = l * z;
            ControlInput::from_array([v[0], v[1], v[2], v[3]])
        })
        .collect();

    let dt = params.dt;
    let costs: Vec<f64> = noise
        .par_chunks(p)
        .map(|v| {
            let mut x = *x0;
            let mut s = 0.0;
            for n in 0..p {
                let u = add(&nominal[n], &v[n]);
                x = propagate(&x, &u, dt);
                s += running_cost(&x, &u, n, ctx) * dt;
            }
            cost_hook(s)
        })
        .collect();

    let weights = importance_weights(&costs, params.lambda_temp);
    let mut optimal = nominal.to_vec();
    for (w, v) in weights.iter().zip(noise.chunks(p)) {
        if *w == 0.0 {
            continue;
        }
        for n in 0..p {
            optimal[n].jerk += v[n].jerk * *w;
            optimal[n].psi_rate += v[n].psi_rate * *w;
        }
    }

    let trajectory = Trajectory::rollout(*x0, optimal.clone(), t0, dt);
    let next = shift_horizon(&optimal, ControlInput::default());
    Ok(MppiOutput {
        trajectory,
        optimal,
        nominal: next,
        weights,
        costs,
    })
}

#[inline]
fn add(a: &ControlInput, b: &ControlInput) -> ControlInput {
    ControlInput {
        jerk: a.jerk + b.jerk,
        psi_rate: a.psi_rate + b.psi_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mppi::RunningCostParams;
    use crate::world::{build_edt, DistanceField, OccupancyGrid};
    use crate::Vec3;

    fn field() -> DistanceField {
        build_edt(&OccupancyGrid::new(Vec3::zeros(), 0.2, [30, 30, 10]).unwrap(), 5.0).unwrap()
    }

    fn small_params(seed: u64) -> MppiParams {
        MppiParams {
            rollouts: 64,
            horizon_steps: 5,
            seed,
            ..MppiParams::default()
        }
    }

    #[test]
    fn shift_semantics() {
        let a = ControlInput::new(Vec3::new(1.0, 0.0, 0.0), 0.0);
        let b = ControlInput::new(Vec3::new(2.0, 0.0, 0.0), 0.0);
        let z = ControlInput::new(Vec3::zeros(), 9.0);
        assert_eq!(shift_horizon(&[a, b], z), vec![b, z]);
        assert_eq!(shift_horizon(&[z, z, z], z), vec![z, z, z]);
        let mut seq = vec![a, b, a, b];
        for _ in 0..4 {
            seq = shift_horizon(&seq, z);
        }
        assert_eq!(seq, vec![z; 4]);
    }

    #[test]
    fn weights_form_a_simplex_and_tolerate_nan() {
        let w = importance_weights(&[3.0, 1.0, f64::NAN, 2.0, f64::INFINITY], 1.0);
        assert_eq!(w[2], 0.0);
        assert_eq!(w[4], 0.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w[1] > w[3] && w[3] > w[0]);
        assert_eq!(importance_weights(&[f64::NAN; 3], 1.0), vec![0.0; 3]);
    }

    #[test]
    fn tied_costs_average_the_noise() {
        let f = field();
        let rc = RunningCostParams::default();
        let params = small_params(5);
        let wps = vec![Vec3::new(3.0, 3.0, 1.0); 5];
        let ctx = CostContext {
            waypoints: &wps,
            field: &f,
            neighbors: &[],
            params: &rc,
            dt: params.dt,
        };
        let x0 = UavState::at_rest(Vec3::new(3.0, 3.0, 1.0), 0.0);
        let nominal = vec![ControlInput::default(); 5];
        let out = mppi_step_with_hook(&x0, &nominal, &ctx, &params, 0.0, |_| 7.0).unwrap();
        for w in &out.weights {
            assert_eq!(*w, 1.0 / 64.0);
        }
        assert!(out.trajectory.is_consistent());
        assert_eq!(out.nominal.len(), 5);
        assert_eq!(out.nominal[..4], out.optimal[1..]);
    }

    #[test]
    fn horizon_contract_is_enforced() {
        let f = field();
        let rc = RunningCostParams::default();
        let params = small_params(0);
        let wps = vec![Vec3::new(3.0, 3.0, 1.0); 4];
        let ctx = CostContext {
            waypoints: &wps,
            field: &f,
            neighbors: &[],
            params: &rc,
            dt: params.dt,
        };
        let x0 = UavState::default();
        let err = mppi_step(&x0, &[ControlInput::default(); 5], &ctx, &params, 0.0).unwrap_err();
        assert!(matches!(err, MppiError::HorizonMismatch { .. }));
    }

    #[test]
    fn non_spd_sigma_is_rejected() {
        let mut p = MppiParams::default();
        p.sigma[0][0] = -1.0;
        assert!(p.validate().is_err());
        let mut p = MppiParams::default();
        p.sigma[0][1] = 0.5;
        assert!(p.validate().is_err());
    }
}
