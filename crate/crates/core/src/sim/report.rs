use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Timeout,
    /// A UAV left the map or entered an occupied cell; the episode stops.
    Crashed,
    ObstacleCollision,
    MutualCollision,
    Distortion,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Timeout => "timeout",
            Outcome::Crashed => "crashed",
            Outcome::ObstacleCollision => "obstacle_collision",
            Outcome::MutualCollision => "mutual_collision",
            Outcome::Distortion => "distortion",
        }
    }
}

/// One row per UAV per cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub time: f64,
    pub uav: usize,
    pub position: Vec3,
    pub velocity: Vec3,
    pub similarity: f64,
    pub d_obs: f64,
    pub scale: f64,
}

pub const TRACE_HEADER: &str = "time,uav,px,py,pz,vx,vy,vz,f,d_obs,scale";

/// Comma-separated trace with a header line.
pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.time,
            r.uav,
            r.position.x,
            r.position.y,
            r.position.z,
            r.velocity.x,
            r.velocity.y,
            r.velocity.z,
            r.similarity,
            r.d_obs,
            r.scale
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub success: bool,
    pub outcome: Outcome,
    pub reached_goal: bool,
    /// Time average of the similarity error over the episode.
    pub avg_similarity: f64,
    pub max_similarity: f64,
    pub min_obstacle_clearance: f64,
    pub min_mutual_distance: f64,
    pub completion_time: f64,
    pub max_speed: f64,
    pub max_acceleration: f64,
    pub min_scale: f64,
    /// Largest planned scale after the minimum was reached.
    pub max_scale_after_min: f64,
    pub final_scale: f64,
    pub cycles: u64,
    /// Cycles in which the planner found no safe step and the swarm held.
    pub hold_cycles: u64,
    /// Cycles in which the forward-only batch fell short and an unrestricted
    /// batch was drawn as well.
    pub backtrack_cycles: u64,
    /// Cycles in which the fresh assignment was rejected for safety.
    pub kept_assignment_cycles: u64,
    /// Broadcast waypoints found outside their owner's corridor.
    pub guidance_violations: u64,
    pub bytes_on_bus: u64,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl EpisodeReport {
    /// Stable-ordered TOML document (trace excluded).
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("episode report always serializes")
    }
}

/// Trapezoidal time average of `values` sampled at `times`. A single sample
/// is its own average.
pub fn time_average(times: &[f64], values: &[f64]) -> f64 {
    match times.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let span = times[n - 1] - times[0];
            if !(span > 0.0) {
                return values[0];
            }
            let area: f64 = (1..n)
                .map(|k| 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]))
                .sum();
            area / span
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid() {
        assert_eq!(time_average(&[0.0, 1.0, 2.0], &[0.0, 2.0, 0.0]), 1.0);
        assert_eq!(time_average(&[3.0], &[0.25]), 0.25);
        assert_eq!(time_average(&[0.0, 2.0], &[1.0, 1.0]), 1.0);
    }

    #[test]
    fn csv_shape() {
        let row = TraceRow {
            time: 0.2,
            uav: 3,
            position: Vec3::new(1.0, 2.0, 1.5),
            velocity: Vec3::zeros(),
            similarity: 0.0,
            d_obs: 5.0,
            scale: 1.0,
        };
        let text = trace_csv(&[row]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(lines[1], "0.2,3,1,2,1.5,0,0,0,0,5,1");
    }
}
