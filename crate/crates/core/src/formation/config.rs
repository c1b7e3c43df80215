use std::sync::Arc;

use crate::Vec3;

use super::FormationError;

/// The desired relative positions `P_des`, shared by every configuration of
/// a run.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationShape(Arc<[Vec3]>);

impl FormationShape {
    pub fn new(offsets: Vec<Vec3>) -> Result<Self, FormationError> {
        if offsets.is_empty() {
            return Err(FormationError::EmptyShape);
        }
        if offsets.iter().any(|p| !p.iter().all(|v| v.is_finite())) {
            return Err(FormationError::NonFiniteShape);
        }
        Ok(Self(offsets.into()))
    }

    /// Same shape translated so that its centroid is the origin.
    pub fn centered(&self) -> Self {
        let c = self.centroid();
        Self(self.0.iter().map(|p| p - c).collect())
    }

    pub fn centroid(&self) -> Vec3 {
        self.0.iter().sum::<Vec3>() / self.0.len() as f64
    }

    pub fn offsets(&self) -> &[Vec3] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The six-UAV triangle: rows of 1, 2 and 3 on an equilateral lattice
    /// with side `spacing`, apex pointing along +x, centered at the origin.
    pub fn triangle6(spacing: f64) -> Self {
        let h = spacing * 3f64.sqrt() / 2.0;
        let raw = vec![
            Vec3::new(2.0 * h, 0.0, 0.0),
            Vec3::new(h, -0.5 * spacing, 0.0),
            Vec3::new(h, 0.5 * spacing, 0.0),
            Vec3::new(0.0, -spacing, 0.0),
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.0, spacing, 0.0),
        ];
        Self(raw.into()).centered()
    }
}

/// One formation instant: every slot `j` sits at `center + scale * p_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationConfig {
    pub scale: f64,
    pub center: Vec3,
    pub shape: FormationShape,
}

impl FormationConfig {
    pub fn new(scale: f64, center: Vec3, shape: FormationShape) -> Self {
        Self {
            scale,
            center,
            shape,
        }
    }

    pub fn len(&self) -> usize {
        self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape.is_empty()
    }

    #[inline]
    pub fn target(&self, slot: usize) -> Vec3 {
        self.center + self.scale * self.shape.offsets()[slot]
    }

    pub fn targets(&self) -> Vec<Vec3> {
        self.shape
            .offsets()
            .iter()
            .map(|p| self.center + self.scale * p)
            .collect()
    }
}

/// Slot positions of `fc`, one per shape entry.
pub fn formation_targets(fc: &FormationConfig) -> Vec<Vec3> {
    fc.targets()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(p: Vec3) -> FormationShape {
        FormationShape::new(vec![p]).unwrap()
    }

    #[test]
    fn identity_scale_zero_center() {
        let fc = FormationConfig::new(1.0, Vec3::zeros(), single(Vec3::new(1.0, 2.0, 3.0)));
        assert_eq!(formation_targets(&fc), vec![Vec3::new(1.0, 2.0, 3.0)]);
    }

    #[test]
    fn scale_and_offset() {
        let fc = FormationConfig::new(2.0, Vec3::new(1.0, 1.0, 1.0), single(Vec3::new(0.5, 0.0, 0.0)));
        assert_eq!(formation_targets(&fc), vec![Vec3::new(2.0, 1.0, 1.0)]);
    }

    #[test]
    fn half_scale_halves_pairwise_distances() {
        let shape = FormationShape::triangle6(1.6);
        let c = Vec3::new(3.0, -2.0, 1.5);
        let full = FormationConfig::new(1.0, c, shape.clone()).targets();
        let half = FormationConfig::new(0.5, c, shape).targets();
        for i in 0..6 {
            for j in 0..6 {
                let a = (full[i] - full[j]).norm();
                let b = (half[i] - half[j]).norm();
                assert!((b - 0.5 * a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn triangle_is_centered_with_unit_lattice_spacing() {
        let s = FormationShape::triangle6(1.6);
        assert!(s.centroid().norm() < 1e-12);
        let o = s.offsets();
        let min_gap = (0..6)
            .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
            .map(|(i, j)| (o[i] - o[j]).norm())
            .fold(f64::INFINITY, f64::min);
        assert!((min_gap - 1.6).abs() < 1e-12);
    }

    #[test]
    fn empty_shape_rejected() {
        assert!(FormationShape::new(vec![]).is_err());
    }
}
