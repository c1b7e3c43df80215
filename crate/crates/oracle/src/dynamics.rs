//! Closed-form evaluation of the discretized linear model
//! `x_{k+1} = M x_k + G u_k` through matrix powers.

use nalgebra::{SMatrix, SVector};
use swarmform_core::mppi::{ControlInput, UavState};
use swarmform_core::Vec3;

type Mat10 = SMatrix<f64, 10, 10>;
type Mat10x4 = SMatrix<f64, 10, 4>;
type Vec10 = SVector<f64, 10>;

/// State order `[p, v, a, psi]`, control order `[jerk, psi_rate]`.
pub fn discrete_model(dt: f64) -> (Mat10, Mat10x4) {
    let mut m = Mat10::identity();
    let mut g = Mat10x4::zeros();
    for k in 0..3 {
        m[(k, 3 + k)] = dt;
        m[(3 + k, 6 + k)] = dt;
        g[(6 + k, k)] = dt;
    }
    g[(9, 3)] = dt;
    (m, g)
}

fn to_vec(x: &UavState) -> Vec10 {
    Vec10::from_fn(|i, _| match i {
        0..=2 => x.p[i],
        3..=5 => x.v[i - 3],
        6..=8 => x.a[i - 6],
        _ => x.psi,
    })
}

/// `x_P = M^P x_0 + sum_k M^(P-1-k) G u_k`, yaw left unwrapped.
pub fn matrix_power_rollout(x0: &UavState, controls: &[ControlInput], dt: f64) -> UavState {
    let (m, g) = discrete_model(dt);
    let p = controls.len();
    let mut x = m.pow(p as u32) * to_vec(x0);
    for (k, u) in controls.iter().enumerate() {
        let uk = SVector::<f64, 4>::from(u.to_array());
        x += m.pow((p - 1 - k) as u32) * g * uk;
    }
    UavState {
        p: Vec3::new(x[0], x[1], x[2]),
        v: Vec3::new(x[3], x[4], x[5]),
        a: Vec3::new(x[6], x[7], x[8]),
        psi: x[9],
    }
}
