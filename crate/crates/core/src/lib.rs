//! Formation-flight planning for UAV swarms in cluttered worlds.
//!
//! The pipeline per replanning cycle: every UAV builds a safe flight corridor
//! ([`corridor`]) from the shared map ([`world`]); the leader samples formation
//! configuration sequences inside the union of corridors ([`formation`]) and
//! assigns UAVs to slots ([`assignment`]); each UAV then tracks its waypoints
//! with MPPI ([`mppi`]). [`sim`] runs whole episodes and scores them.

pub mod assignment;
pub mod corridor;
pub mod formation;
pub mod mppi;
pub mod sim;
pub mod wire;
pub mod world;

pub type Vec3 = nalgebra::Vector3<f64>;
