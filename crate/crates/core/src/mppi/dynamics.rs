use std::f64::consts::PI;

use crate::Vec3;

/// Flat-output state: position, velocity, acceleration and yaw.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UavState {
    pub p: Vec3,
    pub v: Vec3,
    pub a: Vec3,
    pub psi: f64,
}

impl UavState {
    pub fn at_rest(p: Vec3, psi: f64) -> Self {
        Self {
            p,
            psi: wrap_angle(psi),
            ..Self::default()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(self.v.iter()).chain(self.a.iter()).all(|x| x.is_finite()) && self.psi.is_finite()
    }
}

/// Jerk and yaw rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput {
    pub jerk: Vec3,
    pub psi_rate: f64,
}

impl ControlInput {
    pub fn new(jerk: Vec3, psi_rate: f64) -> Self {
        Self { jerk, psi_rate }
    }

    pub fn from_array(u: [f64; 4]) -> Self {
        Self {
            jerk: Vec3::new(u[0], u[1], u[2]),
            psi_rate: u[3],
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.jerk.x, self.jerk.y, self.jerk.z, self.psi_rate]
    }

    pub fn norm_squared(&self) -> f64 {
        self.jerk.norm_squared() + self.psi_rate * self.psi_rate
    }
}

/// Wraps to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    if w == -PI {
        PI
    } else {
        w
    }
}

/// One explicit Euler step of the triple integrator (plus yaw integrator).
#[inline]
pub fn propagate(x: &UavState, mu: &ControlInput, dt: f64) -> UavState {
    UavState {
        p: x.p + x.v * dt,
        v: x.v + x.a * dt,
        a: x.a + mu.jerk * dt,
        psi: wrap_angle(x.psi + mu.psi_rate * dt),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_is_a_fixed_point() {
        let x = UavState::at_rest(Vec3::new(1.0, 2.0, 3.0), 0.3);
        assert_eq!(propagate(&x, &ControlInput::default(), 0.1), x);
    }

    #[test]
    fn velocity_moves_position() {
        let x = UavState {
            v: Vec3::new(1.0, 0.0, 0.0),
            ..UavState::default()
        };
        let y = propagate(&x, &ControlInput::default(), 0.1);
        assert_eq!(y.p, Vec3::new(0.1, 0.0, 0.0));
        assert_eq!(y.v, x.v);
    }

    #[test]
    fn yaw_wraps_into_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        let x = UavState::at_rest(Vec3::zeros(), 3.1);
        let y = propagate(&x, &ControlInput::new(Vec3::zeros(), 1.0), 0.1);
        assert!(y.psi < 0.0 && y.psi > -PI);
    }
}
