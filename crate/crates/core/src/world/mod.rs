//! Occupancy worlds, scenario generation and the distance transform.

mod edt;
mod grid;
mod route;
mod scenario;

pub use edt::{build_edt, query_distance, squared_cell_distances, DistanceField};
pub use grid::OccupancyGrid;
pub use route::{clearance_route, lookahead_point, RouteParams};
pub use scenario::{
    generate_layout, generate_scenario, Pillar, ScenarioKind, ScenarioLayout, ScenarioSpec,
    DEFAULT_HEIGHT,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("grid resolution must be positive and finite, got {0}")]
    InvalidResolution(f64),
    #[error("grid dims must all be at least 1, got {0:?}")]
    InvalidDims([usize; 3]),
    #[error("expected {expected} cells, got {got}")]
    CellCount { expected: usize, got: usize },
    #[error("grid byte stream is truncated")]
    Truncated,
    #[error("cell byte must be 0 or 1, got {0}")]
    BadCellByte(u8),
    #[error("distance cap must be positive, got {0}")]
    InvalidCap(f64),
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("placed only {placed} of {requested} pillars before giving up")]
    PlacementFailed { placed: usize, requested: usize },
}
