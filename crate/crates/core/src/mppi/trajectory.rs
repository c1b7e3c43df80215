use crate::Vec3;

use super::{propagate, ControlInput, UavState};

/// States `x_0..=x_P` produced by `controls` from `states[0]`, uniformly
/// spaced by `dt` starting at `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<UavState>,
    pub controls: Vec<ControlInput>,
    pub t0: f64,
    pub dt: f64,
}

impl Trajectory {
    pub fn rollout(x0: UavState, controls: Vec<ControlInput>, t0: f64, dt: f64) -> Self {
        let mut states = Vec::with_capacity(controls.len() + 1);
        states.push(x0);
        for u in &controls {
            let next = propagate(states.last().unwrap(), u, dt);
            states.push(next);
        }
        Self { states, controls, t0, dt }
    }

    /// A trajectory that sits at `x` for `steps` intervals.
    pub fn hold(x: UavState, steps: usize, t0: f64, dt: f64) -> Self {
        let rest = UavState { v: Vec3::zeros(), a: Vec3::zeros(), ..x };
        Self {
            states: vec![rest; steps + 1],
            controls: vec![ControlInput::default(); steps],
            t0,
            dt,
        }
    }

    pub fn steps(&self) -> usize {
        self.controls.len()
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.dt * self.steps() as f64
    }

    pub fn timestamps(&self) -> Vec<f64> {
        (0..self.states.len()).map(|k| self.t0 + self.dt * k as f64).collect()
    }

    /// Re-propagates and compares bitwise.
    pub fn is_consistent(&self) -> bool {
        self.states.len() == self.controls.len() + 1
            && self
                .controls
                .iter()
                .enumerate()
                .all(|(k, u)| propagate(&self.states[k], u, self.dt) == self.states[k + 1])
    }

    /// Position and velocity at time `t` by cubic Hermite interpolation of
    /// the knot positions and velocities. Clamped outside `[t0, t_end]`.
    pub fn sample(&self, t: f64) -> (Vec3, Vec3) {
        let n = self.steps();
        if n == 0 || t <= self.t0 {
            let s = &self.states[0];
            return (s.p, s.v);
        }
        if t >= self.t_end() {
            let s = &self.states[n];
            return (s.p, s.v);
        }
        let u = (t - self.t0) / self.dt;
        let k = (u.floor() as usize).min(n - 1);
        let s = u - k as f64;
        let (a, b) = (&self.states[k], &self.states[k + 1]);
        let h = self.dt;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let p = a.p * h00 + a.v * (h10 * h) + b.p * h01 + b.v * (h11 * h);
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let v = (a.p * d00 + b.p * d01) / h + a.v * d10 + b.v * d11;
        (p, v)
    }

    pub fn position_at(&self, t: f64) -> Vec3 {
        self.sample(t).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rollout_is_consistent_and_hermite_hits_knots() {
        let x0 = UavState::at_rest(Vec3::new(1.0, 0.0, 1.0), 0.0);
        let controls: Vec<ControlInput> = (0..10)
            .map(|k| ControlInput::new(Vec3::new(1.0, -0.5 * k as f64, 0.2), 0.1))
            .collect();
        let traj = Trajectory::rollout(x0, controls, 2.0, 0.1);
        assert!(traj.is_consistent());
        for (k, t) in traj.timestamps().into_iter().enumerate() {
            let (p, v) = traj.sample(t);
            assert!((p - traj.states[k].p).norm() < 1e-12);
            assert!((v - traj.states[k].v).norm() < 1e-12);
        }
        assert_eq!(traj.position_at(100.0), traj.states[10].p);
        assert_eq!(traj.position_at(-1.0), x0.p);
    }

    #[test]
    fn constant_velocity_is_reproduced_between_knots() {
        let x0 = UavState {
            v: Vec3::new(1.0, 2.0, 0.0),
            ..UavState::default()
        };
        let traj = Trajectory::rollout(x0, vec![ControlInput::default(); 4], 0.0, 0.1);
        let (p, v) = traj.sample(0.25);
        assert!((p - Vec3::new(0.25, 0.5, 0.0)).norm() < 1e-12);
        assert!((v - x0.v).norm() < 1e-12);
    }

    #[test]
    fn tampering_breaks_consistency() {
        let mut traj = Trajectory::hold(UavState::default(), 3, 0.0, 0.1);
        assert!(traj.is_consistent());
        traj.states[2].p.x += 1e-9;
        assert!(!traj.is_consistent());
    }
}
