//! Per-UAV trajectory optimization by model predictive path integral control
//! over the flat-output triple integrator.

mod cost;
mod dynamics;
mod optimizer;
mod trajectory;

pub use cost::{
    barrier, dynamics_violated, mutual_distance, running_cost, running_cost_terms, CostContext, RunningCost,
    RunningCostParams,
};
pub use dynamics::{propagate, wrap_angle, ControlInput, UavState};
pub use optimizer::{importance_weights, mppi_step, mppi_step_with_hook, shift_horizon, MppiOutput, MppiParams};
pub use trajectory::Trajectory;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MppiError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("horizon mismatch: expected {expected} steps, got {got}")]
    HorizonMismatch { expected: usize, got: usize },
}
