//! Little-endian byte layouts of the messages exchanged between UAVs.
//!
//! * State report (UAV -> leader): position (3 x f64), `d_obs` (f64), then
//!   the corridor in [`Polytope::to_bytes`] form.
//! * Guidance broadcast (leader -> all): `N` (u64), `T_S` (u64), the
//!   assignment (`N` x u64), then `N * T_S` waypoints (3 x f64 each), UAV by
//!   UAV.
//! * Trajectory share (UAV -> neighbors): state count (u64), `t0`, `dt`,
//!   states (10 x f64: p, v, a, psi), then one control (4 x f64) per
//!   interval.

use thiserror::Error;

use crate::corridor::{CorridorError, Polytope};
use crate::formation::GuidancePathSet;
use crate::mppi::{ControlInput, Trajectory, UavState};
use crate::Vec3;

#[derive(Debug, Error, PartialEq)]
pub enum WireError {
    #[error("message truncated")]
    Truncated,
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error(transparent)]
    Corridor(#[from] CorridorError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateReport {
    pub position: Vec3,
    pub d_obs: f64,
    pub corridor: Polytope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceBroadcast {
    /// UAV id -> slot.
    pub assignment: Vec<usize>,
    pub paths: GuidancePathSet,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn word(&mut self) -> Result<[u8; 8], WireError> {
        let w = self.bytes.get(self.pos..self.pos + 8).ok_or(WireError::Truncated)?;
        self.pos += 8;
        Ok(w.try_into().unwrap())
    }

    fn f64(&mut self) -> Result<f64, WireError> {
        Ok(f64::from_le_bytes(self.word()?))
    }

    fn u64(&mut self) -> Result<usize, WireError> {
        usize::try_from(u64::from_le_bytes(self.word()?)).map_err(|_| WireError::Malformed("count overflow".into()))
    }

    fn vec3(&mut self) -> Result<Vec3, WireError> {
        Ok(Vec3::new(self.f64()?, self.f64()?, self.f64()?))
    }

    /// Fails early on counts that cannot fit in the remaining bytes.
    fn check_room(&self, items: usize, item_bytes: usize) -> Result<(), WireError> {
        let need = items.checked_mul(item_bytes).ok_or(WireError::Truncated)?;
        if self.bytes.len() - self.pos < need {
            return Err(WireError::Truncated);
        }
        Ok(())
    }

    fn finish(self) -> Result<(), WireError> {
        match self.bytes.len() - self.pos {
            0 => Ok(()),
            n => Err(WireError::Trailing(n)),
        }
    }
}

fn put_f64(out: &mut Vec<u8>, x: f64) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, x: usize) {
    out.extend_from_slice(&(x as u64).to_le_bytes());
}

fn put_vec3(out: &mut Vec<u8>, v: &Vec3) {
    for x in v.iter() {
        put_f64(out, *x);
    }
}

pub fn encode_state_report(msg: &StateReport) -> Vec<u8> {
    let mut out = Vec::new();
    put_vec3(&mut out, &msg.position);
    put_f64(&mut out, msg.d_obs);
    out.extend_from_slice(&msg.corridor.to_bytes());
    out
}

pub fn decode_state_report(bytes: &[u8]) -> Result<StateReport, WireError> {
    let mut r = Reader::new(bytes);
    let position = r.vec3()?;
    let d_obs = r.f64()?;
    let (corridor, used) = Polytope::from_bytes(&bytes[r.pos..], position)?;
    r.pos += used;
    r.finish()?;
    Ok(StateReport {
        position,
        d_obs,
        corridor,
    })
}

pub fn encode_guidance(msg: &GuidanceBroadcast) -> Vec<u8> {
    let n = msg.paths.uav_count();
    let steps = msg.paths.steps();
    let mut out = Vec::with_capacity(16 + 8 * n + 24 * n * steps);
    put_u64(&mut out, n);
    put_u64(&mut out, steps);
    for &slot in &msg.assignment {
        put_u64(&mut out, slot);
    }
    for path in &msg.paths.paths {
        for wp in path {
            put_vec3(&mut out, wp);
        }
    }
    out
}

pub fn decode_guidance(bytes: &[u8]) -> Result<GuidanceBroadcast, WireError> {
    let mut r = Reader::new(bytes);
    let n = r.u64()?;
    let steps = r.u64()?;
    r.check_room(n, 8)?;
    let assignment = (0..n).map(|_| r.u64()).collect::<Result<Vec<_>, _>>()?;
    let mut seen = vec![false; n];
    for &slot in &assignment {
        if slot >= n || std::mem::replace(&mut seen[slot], true) {
            return Err(WireError::Malformed("assignment is not a permutation".into()));
        }
    }
    r.check_room(n.checked_mul(steps).ok_or(WireError::Truncated)?, 24)?;
    let paths = (0..n)
        .map(|_| (0..steps).map(|_| r.vec3()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    r.finish()?;
    Ok(GuidanceBroadcast {
        assignment,
        paths: GuidancePathSet { paths },
    })
}

pub fn encode_trajectory(traj: &Trajectory) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 80 * traj.states.len() + 32 * traj.controls.len());
    put_u64(&mut out, traj.states.len());
    put_f64(&mut out, traj.t0);
    put_f64(&mut out, traj.dt);
    for s in &traj.states {
        put_vec3(&mut out, &s.p);
        put_vec3(&mut out, &s.v);
        put_vec3(&mut out, &s.a);
        put_f64(&mut out, s.psi);
    }
    for u in &traj.controls {
        for x in u.to_array() {
            put_f64(&mut out, x);
        }
    }
    out
}

pub fn decode_trajectory(bytes: &[u8]) -> Result<Trajectory, WireError> {
    let mut r = Reader::new(bytes);
    let count = r.u64()?;
    if count == 0 {
        return Err(WireError::Malformed("trajectory without states".into()));
    }
    let t0 = r.f64()?;
    let dt = r.f64()?;
    r.check_room(count, 80)?;
    let states = (0..count)
        .map(|_| {
            Ok(UavState {
                p: r.vec3()?,
                v: r.vec3()?,
                a: r.vec3()?,
                psi: r.f64()?,
            })
        })
        .collect::<Result<Vec<_>, WireError>>()?;
    r.check_room(count - 1, 32)?;
    let controls = (0..count - 1)
        .map(|_| Ok(ControlInput::from_array([r.f64()?, r.f64()?, r.f64()?, r.f64()?])))
        .collect::<Result<Vec<_>, WireError>>()?;
    r.finish()?;
    Ok(Trajectory {
        states,
        controls,
        t0,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_report_round_trip() {
        let p = Vec3::new(1.0, 2.0, 1.5);
        let corridor = Polytope::from_box(p - Vec3::repeat(1.0), p + Vec3::repeat(2.0), p).unwrap();
        let msg = StateReport {
            position: p,
            d_obs: 0.7,
            corridor,
        };
        let bytes = encode_state_report(&msg);
        assert_eq!(bytes.len(), 32 + 8 + 6 * 32);
        assert_eq!(decode_state_report(&bytes).unwrap(), msg);
        assert_eq!(decode_state_report(&bytes[..bytes.len() - 1]).unwrap_err(), WireError::Corridor(CorridorError::Truncated));
    }

    #[test]
    fn guidance_round_trip_and_validation() {
        let msg = GuidanceBroadcast {
            assignment: vec![1, 0],
            paths: GuidancePathSet {
                paths: vec![vec![Vec3::new(0.0, 1.0, 2.0); 3], vec![Vec3::new(-1.0, 0.5, 0.25); 3]],
            },
        };
        let mut bytes = encode_guidance(&msg);
        assert_eq!(decode_guidance(&bytes).unwrap(), msg);
        bytes[16] = 0; // assignment [0, 0]
        assert!(matches!(decode_guidance(&bytes), Err(WireError::Malformed(_))));
        bytes.push(0);
        assert!(decode_guidance(&bytes).is_err());
    }

    #[test]
    fn trajectory_round_trip_is_bitwise() {
        let x0 = UavState::at_rest(Vec3::new(0.1, 0.2, 0.3), 0.4);
        let controls = vec![ControlInput::new(Vec3::new(0.3, -1.0 / 3.0, 2.0), 0.1); 4];
        let traj = Trajectory::rollout(x0, controls, 1.7, 0.1);
        let back = decode_trajectory(&encode_trajectory(&traj)).unwrap();
        assert_eq!(back, traj);
        assert!(back.is_consistent());
    }

    #[test]
    fn absurd_counts_do_not_allocate() {
        let mut bytes = vec![0u8; 16];
        bytes[..8].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(decode_guidance(&bytes).is_err());
        assert!(decode_trajectory(&bytes).is_err());
    }
}
