//! Centralized formation guidance: configurations, sampling, evaluation and
//! the sequence planner run by the leader.

mod config;
mod cost;
mod planner;
mod sampling;

pub use config::{formation_targets, FormationConfig, FormationShape};
pub use cost::{evaluate_fc, turn_angle, EvalContext, FcCost, FrontWeights, PrevStep};
pub use planner::{plan_formation_paths, FormationSequence, GuidancePathSet, PlanOutcome, PlanRequest};
pub use sampling::{sample_center, sample_step, SampleParams};

use thiserror::Error;

use crate::assignment::AssignmentError;

#[derive(Debug, Error, PartialEq)]
pub enum FormationError {
    #[error("formation shape is empty")]
    EmptyShape,
    #[error("formation shape has non-finite entries")]
    NonFiniteShape,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("inputs disagree on the number of UAVs")]
    SizeMismatch,
    #[error("no safe formation step")]
    NoSafeStep,
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
}
