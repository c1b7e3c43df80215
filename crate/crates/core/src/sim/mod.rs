//! Deterministic multi-UAV episodes and their metrics.

mod bus;
mod config;
mod engine;
mod report;
mod similarity;

pub use bus::{Bus, BusMessage, PayloadKind};
pub use config::{GuideParams, SwarmConfig};
pub use engine::{run_episode, CycleRecord, CycleStatus, Episode};
pub use report::{time_average, trace_csv, EpisodeReport, Outcome, TraceRow, TRACE_HEADER};
pub use similarity::formation_similarity;

use thiserror::Error;

use crate::corridor::CorridorError;
use crate::formation::FormationError;
use crate::mppi::MppiError;
use crate::wire::WireError;
use crate::world::WorldError;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("config error: {0}")]
    Config(String),
    #[error("similarity: {0}")]
    Similarity(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Corridor(#[from] CorridorError),
    #[error(transparent)]
    Formation(#[from] FormationError),
    #[error(transparent)]
    Mppi(#[from] MppiError),
    #[error(transparent)]
    Wire(#[from] WireError),
}
