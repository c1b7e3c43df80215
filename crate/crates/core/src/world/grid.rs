use crate::Vec3;

use super::WorldError;

/// Dense boolean occupancy over an axis-aligned box of cubic cells.
///
/// Cells are stored row-major with `z` varying fastest, then `y`, then `x`:
/// `index = (ix * ny + iy) * nz + iz`. Cell `(ix, iy, iz)` has its center at
/// `origin + (i + 0.5) * resolution` on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    origin: Vec3,
    resolution: f64,
    dims: [usize; 3],
    cells: Vec<bool>,
}

impl OccupancyGrid {
    /// An all-free grid.
    pub fn new(origin: Vec3, resolution: f64, dims: [usize; 3]) -> Result<Self, WorldError> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(WorldError::InvalidResolution(resolution));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(WorldError::InvalidDims(dims));
        }
        let len = dims[0] * dims[1] * dims[2];
        Ok(Self {
            origin,
            resolution,
            dims,
            cells: vec![false; len],
        })
    }

    pub fn from_cells(
        origin: Vec3,
        resolution: f64,
        dims: [usize; 3],
        cells: Vec<bool>,
    ) -> Result<Self, WorldError> {
        let mut grid = Self::new(origin, resolution, dims)?;
        if cells.len() != grid.cells.len() {
            return Err(WorldError::CellCount {
                expected: grid.cells.len(),
                got: cells.len(),
            });
        }
        grid.cells = cells;
        Ok(grid)
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.dims[1] + iy) * self.dims[2] + iz
    }

    #[inline]
    pub fn coords(&self, index: usize) -> [usize; 3] {
        let iz = index % self.dims[2];
        let rest = index / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], iz]
    }

    #[inline]
    pub fn cell_center(&self, ix: usize, iy: usize, iz: usize) -> Vec3 {
        let r = self.resolution;
        self.origin + Vec3::new((ix as f64 + 0.5) * r, (iy as f64 + 0.5) * r, (iz as f64 + 0.5) * r)
    }

    #[inline]
    pub fn is_occupied(&self, ix: usize, iy: usize, iz: usize) -> bool {
        self.cells[self.index(ix, iy, iz)]
    }

    pub fn set_occupied(&mut self, ix: usize, iy: usize, iz: usize, occupied: bool) {
        let i = self.index(ix, iy, iz);
        self.cells[i] = occupied;
    }

    /// Lower corner of the covered box.
    pub fn min_corner(&self) -> Vec3 {
        self.origin
    }

    /// Upper corner of the covered box.
    pub fn max_corner(&self) -> Vec3 {
        let r = self.resolution;
        self.origin
            + Vec3::new(
                self.dims[0] as f64 * r,
                self.dims[1] as f64 * r,
                self.dims[2] as f64 * r,
            )
    }

    pub fn contains_point(&self, p: &Vec3) -> bool {
        let lo = self.min_corner();
        let hi = self.max_corner();
        (0..3).all(|k| p[k] >= lo[k] && p[k] < hi[k])
    }

    /// Cell containing `p`, or `None` outside the grid.
    pub fn cell_of(&self, p: &Vec3) -> Option<[usize; 3]> {
        if !self.contains_point(p) {
            return None;
        }
        let mut out = [0usize; 3];
        for k in 0..3 {
            let i = ((p[k] - self.origin[k]) / self.resolution).floor() as usize;
            out[k] = i.min(self.dims[k] - 1);
        }
        Some(out)
    }

    /// Occupancy of the cell containing `p`; `None` outside the grid.
    pub fn occupied_at(&self, p: &Vec3) -> Option<bool> {
        self.cell_of(p).map(|[x, y, z]| self.is_occupied(x, y, z))
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Dense little-endian export: `nx, ny, nz` as u64, resolution and the
    /// three origin coordinates as f64, then one byte per cell (0 free,
    /// 1 occupied) in storage order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(56 + self.cells.len());
        for d in self.dims {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        out.extend_from_slice(&self.resolution.to_le_bytes());
        for k in 0..3 {
            out.extend_from_slice(&self.origin[k].to_le_bytes());
        }
        out.extend(self.cells.iter().map(|&c| c as u8));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WorldError> {
        const HEADER: usize = 3 * 8 + 4 * 8;
        if bytes.len() < HEADER {
            return Err(WorldError::Truncated);
        }
        let word = |i: usize| -> [u8; 8] { bytes[i * 8..i * 8 + 8].try_into().unwrap() };
        let mut dims = [0usize; 3];
        for (k, d) in dims.iter_mut().enumerate() {
            *d = u64::from_le_bytes(word(k)) as usize;
        }
        let resolution = f64::from_le_bytes(word(3));
        let origin = Vec3::new(
            f64::from_le_bytes(word(4)),
            f64::from_le_bytes(word(5)),
            f64::from_le_bytes(word(6)),
        );
        let body = &bytes[HEADER..];
        let expected = dims[0].saturating_mul(dims[1]).saturating_mul(dims[2]);
        if body.len() != expected {
            return Err(WorldError::CellCount {
                expected,
                got: body.len(),
            });
        }
        let cells = body
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(WorldError::BadCellByte(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_cells(origin, resolution, dims, cells)
    }
}
