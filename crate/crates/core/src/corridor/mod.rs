//! Per-UAV safe flight corridors and the formation connectivity predicate.

mod polytope;
mod sfc;

pub use polytope::{Polytope, CONTAINMENT_TOLERANCE};
pub use sfc::{generate_sfc, SfcParams};

use thiserror::Error;

use crate::formation::FormationConfig;
use crate::Vec3;

#[derive(Debug, Error, PartialEq)]
pub enum CorridorError {
    #[error("position {0:?} is outside the grid")]
    OutOfBounds(Vec3),
    #[error("position {0:?} is inside an occupied cell")]
    Occupied(Vec3),
    #[error("seed point is not strictly inside the polytope")]
    SeedNotInterior,
    #[error("malformed polytope: {0}")]
    Malformed(String),
    #[error("polytope byte stream is truncated")]
    Truncated,
    #[error("corridor parameters out of range")]
    InvalidParams,
}

/// One corridor per UAV, indexed by UAV id.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationSafeRegion {
    polytopes: Vec<Polytope>,
}

impl FormationSafeRegion {
    pub fn new(polytopes: Vec<Polytope>) -> Self {
        Self { polytopes }
    }

    pub fn len(&self) -> usize {
        self.polytopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polytopes.is_empty()
    }

    pub fn polytopes(&self) -> &[Polytope] {
        &self.polytopes
    }

    pub fn get(&self, uav: usize) -> &Polytope {
        &self.polytopes[uav]
    }

    /// True when every UAV's assigned target lies in its own corridor.
    pub fn admits(&self, targets: &[Vec3], assignment: &[usize]) -> bool {
        self.polytopes
            .iter()
            .zip(assignment)
            .all(|(poly, &slot)| poly.contains(&targets[slot]))
    }
}

/// Two configurations are connected when, for every UAV `i`, its assigned
/// target in both lies inside `P_i`. By convexity the straight segment
/// between the two targets is then inside `P_i` as well.
pub fn check_connectivity(
    fc_m: &FormationConfig,
    fc_n: &FormationConfig,
    region: &FormationSafeRegion,
    assignment: &[usize],
) -> bool {
    let n = region.len();
    if assignment.len() != n || fc_m.len() != n || fc_n.len() != n {
        return false;
    }
    region.admits(&fc_m.targets(), assignment) && region.admits(&fc_n.targets(), assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::FormationShape;

    fn line_shape() -> FormationShape {
        FormationShape::new(vec![Vec3::new(-1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)]).unwrap()
    }

    fn boxes() -> FormationSafeRegion {
        let b = |cx: f64| {
            Polytope::from_box(
                Vec3::new(cx - 0.8, -1.0, -1.0),
                Vec3::new(cx + 0.8, 1.0, 1.0),
                Vec3::new(cx, 0.0, 0.0),
            )
            .unwrap()
        };
        FormationSafeRegion::new(vec![b(-1.0), b(1.0)])
    }

    #[test]
    fn reflexive_when_interior() {
        let fc = FormationConfig::new(1.0, Vec3::zeros(), line_shape());
        assert!(check_connectivity(&fc, &fc, &boxes(), &[0, 1]));
    }

    #[test]
    fn one_target_outside_breaks_connectivity() {
        let shape = line_shape();
        let a = FormationConfig::new(1.0, Vec3::zeros(), shape.clone());
        let b = FormationConfig::new(1.0, Vec3::new(1.0, 0.0, 0.0), shape);
        assert!(!check_connectivity(&a, &b, &boxes(), &[0, 1]));
        // Swapped assignment puts both targets in the wrong corridor.
        assert!(!check_connectivity(&a, &a, &boxes(), &[1, 0]));
    }

    #[test]
    fn size_mismatch_is_not_connected() {
        let fc = FormationConfig::new(1.0, Vec3::zeros(), line_shape());
        assert!(!check_connectivity(&fc, &fc, &boxes(), &[0]));
    }
}
