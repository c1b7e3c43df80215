use crate::Vec3;

use super::CorridorError;

/// Containment slack for `contains`, in meters.
pub const CONTAINMENT_TOLERANCE: f64 = 1e-9;

/// Convex polytope `{p : n_l . p <= b_l for all faces l}` with unit outward
/// normals, plus the interior point it was grown from.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    normals: Vec<Vec3>,
    offsets: Vec<f64>,
    seed_point: Vec3,
}

impl Polytope {
    /// Build from raw halfspaces. Normals are renormalized (offsets scaled
    /// accordingly) and the seed must be strictly interior.
    pub fn new(normals: Vec<Vec3>, offsets: Vec<f64>, seed_point: Vec3) -> Result<Self, CorridorError> {
        if normals.len() != offsets.len() {
            return Err(CorridorError::Malformed("normal/offset count mismatch".into()));
        }
        if normals.len() < 4 {
            return Err(CorridorError::Malformed(format!(
                "a bounded polytope needs at least 4 faces, got {}",
                normals.len()
            )));
        }
        let mut unit = Vec::with_capacity(normals.len());
        let mut b = Vec::with_capacity(offsets.len());
        for (n, off) in normals.into_iter().zip(offsets) {
            let len = n.norm();
            if !(len > 0.0) || !len.is_finite() || !off.is_finite() {
                return Err(CorridorError::Malformed("degenerate face".into()));
            }
            unit.push(n / len);
            b.push(off / len);
        }
        let poly = Self {
            normals: unit,
            offsets: b,
            seed_point,
        };
        if poly.max_violation(&seed_point) >= 0.0 {
            return Err(CorridorError::SeedNotInterior);
        }
        Ok(poly)
    }

    /// Axis-aligned box `[lo, hi]` as six halfspaces.
    pub fn from_box(lo: Vec3, hi: Vec3, seed_point: Vec3) -> Result<Self, CorridorError> {
        let mut normals = Vec::with_capacity(6);
        let mut offsets = Vec::with_capacity(6);
        for k in 0..3 {
            let mut n = Vec3::zeros();
            n[k] = 1.0;
            normals.push(n);
            offsets.push(hi[k]);
            normals.push(-n);
            offsets.push(-lo[k]);
        }
        Self::new(normals, offsets, seed_point)
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn seed_point(&self) -> Vec3 {
        self.seed_point
    }

    pub fn face_count(&self) -> usize {
        self.normals.len()
    }

    /// `max_l (n_l . p - b_l)`; negative strictly inside.
    pub fn max_violation(&self, p: &Vec3) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(n, b)| n.dot(p) - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(n, b)| n.dot(p) <= b + CONTAINMENT_TOLERANCE)
    }

    pub(crate) fn push_face(&mut self, normal: Vec3, offset: f64) {
        self.normals.push(normal);
        self.offsets.push(offset);
    }

    /// Wire form: `n_l` as u64 then `n_l` rows of `(nx, ny, nz, b)` as f64,
    /// all little-endian. The seed point travels separately (it is the
    /// sender's reported position).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 32 * self.face_count());
        out.extend_from_slice(&(self.face_count() as u64).to_le_bytes());
        for (n, b) in self.normals.iter().zip(&self.offsets) {
            for v in [n.x, n.y, n.z, *b] {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Inverse of [`Polytope::to_bytes`]; returns the polytope and the number
    /// of bytes consumed.
    pub fn from_bytes(bytes: &[u8], seed_point: Vec3) -> Result<(Self, usize), CorridorError> {
        let word = |i: usize| -> Result<[u8; 8], CorridorError> {
            bytes
                .get(i..i + 8)
                .map(|w| w.try_into().unwrap())
                .ok_or(CorridorError::Truncated)
        };
        let count = u64::from_le_bytes(word(0)?) as usize;
        let needed = count
            .checked_mul(32)
            .and_then(|b| b.checked_add(8))
            .ok_or(CorridorError::Truncated)?;
        if bytes.len() < needed {
            return Err(CorridorError::Truncated);
        }
        let mut normals = Vec::with_capacity(count);
        let mut offsets = Vec::with_capacity(count);
        for row in 0..count {
            let base = 8 + row * 32;
            let f = |k: usize| f64::from_le_bytes(word(base + 8 * k).unwrap());
            normals.push(Vec3::new(f(0), f(1), f(2)));
            offsets.push(f(3));
        }
        // Decoded faces are already unit length; keep them bit-identical.
        let poly = Self {
            normals,
            offsets,
            seed_point,
        };
        if poly.face_count() < 4 || poly.normals.iter().any(|n| (n.norm() - 1.0).abs() > 1e-9) {
            return Err(CorridorError::Malformed("decoded faces are not unit normals".into()));
        }
        if poly.max_violation(&seed_point) >= 0.0 {
            return Err(CorridorError::SeedNotInterior);
        }
        Ok((poly, needed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> Polytope {
        Polytope::from_box(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0), Vec3::zeros()).unwrap()
    }

    #[test]
    fn seed_is_contained() {
        let b = unit_box();
        assert!(b.contains(&b.seed_point()));
    }

    #[test]
    fn outside_box_is_rejected() {
        let b = unit_box();
        assert!(!b.contains(&Vec3::new(1.1, 0.0, 0.0)));
        assert!(!b.contains(&Vec3::new(0.0, 0.0, -1.0 - 1e-6)));
        assert!(b.contains(&Vec3::new(1.0, 1.0, 1.0)));
        assert!(b.contains(&Vec3::new(1.0 + 1e-10, 0.0, 0.0)));
    }

    #[test]
    fn constructor_normalizes_and_validates() {
        let n = vec![
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, -1.0),
        ];
        let b = vec![2.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        let p = Polytope::new(n.clone(), b.clone(), Vec3::zeros()).unwrap();
        assert_eq!(p.offsets()[0], 1.0);
        assert!(matches!(
            Polytope::new(n.clone(), b.clone(), Vec3::new(5.0, 0.0, 0.0)),
            Err(CorridorError::SeedNotInterior)
        ));
        assert!(Polytope::new(n[..3].to_vec(), b[..3].to_vec(), Vec3::zeros()).is_err());
    }

    #[test]
    fn wire_round_trip() {
        let mut p = unit_box();
        p.push_face(Vec3::new(1.0, 1.0, 0.0).normalize(), 1.2);
        let bytes = p.to_bytes();
        assert_eq!(bytes.len(), 8 + 7 * 32);
        assert_eq!(&bytes[..8], &7u64.to_le_bytes());
        let (q, used) = Polytope::from_bytes(&bytes, p.seed_point()).unwrap();
        assert_eq!(used, bytes.len());
        assert_eq!(q, p);
        assert!(matches!(
            Polytope::from_bytes(&bytes[..100], Vec3::zeros()),
            Err(CorridorError::Truncated)
        ));
    }
}
