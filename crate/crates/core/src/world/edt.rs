//! Exact Euclidean distance transform over cell centers.
//!
//! Squared distances are computed in integer cell units with the separable
//! lower-envelope-of-parabolas transform (one pass per axis), so the result is
//! exact: every intermediate value is a small integer held in an `f64`.

use crate::Vec3;

use super::{OccupancyGrid, WorldError};

/// Distance (m) from each cell center to the nearest occupied cell center,
/// clamped at `d_cap`. Occupied cells hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    origin: Vec3,
    resolution: f64,
    dims: [usize; 3],
    values: Vec<f64>,
    d_cap: f64,
}

impl DistanceField {
    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn d_cap(&self) -> f64 {
        self.d_cap
    }

    #[inline]
    pub fn value(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        self.values[(ix * self.dims[1] + iy) * self.dims[2] + iz]
    }

    /// Trilinear interpolation of the stored cell-center values.
    ///
    /// Points outside the covered box are clamped onto the outermost layer of
    /// cell centers, so the query never fails.
    pub fn query(&self, p: &Vec3) -> f64 {
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for k in 0..3 {
            let n = self.dims[k];
            let u = (p[k] - self.origin[k]) / self.resolution - 0.5;
            let u = u.clamp(0.0, (n - 1) as f64);
            if n == 1 {
                base[k] = 0;
                frac[k] = 0.0;
            } else {
                let i = (u.floor() as usize).min(n - 2);
                base[k] = i;
                frac[k] = u - i as f64;
            }
        }
        let step = |k: usize| usize::from(self.dims[k] > 1);
        let (sx, sy, sz) = (step(0), step(1), step(2));
        let [x, y, z] = base;
        let [fx, fy, fz] = frac;
        let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
        let c00 = lerp(self.value(x, y, z), self.value(x + sx, y, z), fx);
        let c10 = lerp(self.value(x, y + sy, z), self.value(x + sx, y + sy, z), fx);
        let c01 = lerp(self.value(x, y, z + sz), self.value(x + sx, y, z + sz), fx);
        let c11 = lerp(
            self.value(x, y + sy, z + sz),
            self.value(x + sx, y + sy, z + sz),
            fx,
        );
        lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz)
    }
}

/// Convenience wrapper matching the free-function style used elsewhere.
pub fn query_distance(field: &DistanceField, p: &Vec3) -> f64 {
    field.query(p)
}

/// Squared distance in cell units from every cell to the nearest occupied
/// cell; `f64::INFINITY` where the grid holds no occupied cell at all.
pub fn squared_cell_distances(grid: &OccupancyGrid) -> Vec<f64> {
    let [nx, ny, nz] = grid.dims();
    let mut d2: Vec<f64> = grid
        .cells()
        .iter()
        .map(|&occ| if occ { 0.0 } else { f64::INFINITY })
        .collect();

    let longest = nx.max(ny).max(nz);
    let mut scratch = Envelope::with_capacity(longest);
    let mut line = vec![0.0; longest];
    let mut out = vec![0.0; longest];

    // z is contiguous, then y (stride nz), then x (stride ny * nz).
    let axes = [(nz, 1usize), (ny, nz), (nx, ny * nz)];
    for (len, stride) in axes {
        for start in line_starts(grid.dims(), stride, len) {
            for i in 0..len {
                line[i] = d2[start + i * stride];
            }
            scratch.transform(&line[..len], &mut out[..len]);
            for i in 0..len {
                d2[start + i * stride] = out[i];
            }
        }
    }
    d2
}

/// Build the clamped distance field of `grid`.
pub fn build_edt(grid: &OccupancyGrid, d_cap: f64) -> Result<DistanceField, WorldError> {
    if !(d_cap > 0.0) {
        return Err(WorldError::InvalidCap(d_cap));
    }
    let r = grid.resolution();
    let values = squared_cell_distances(grid)
        .into_iter()
        .map(|d2| {
            if d2.is_finite() {
                (d2.sqrt() * r).min(d_cap)
            } else {
                d_cap
            }
        })
        .collect();
    Ok(DistanceField {
        origin: grid.origin(),
        resolution: r,
        dims: grid.dims(),
        values,
        d_cap,
    })
}

fn line_starts(dims: [usize; 3], stride: usize, len: usize) -> Vec<usize> {
    let total = dims[0] * dims[1] * dims[2];
    let block = stride * len;
    let mut starts = Vec::with_capacity(total / len);
    let mut base = 0;
    while base < total {
        for offset in 0..stride {
            starts.push(base + offset);
        }
        base += block;
    }
    starts
}

/// Lower envelope of parabolas `(q - v)^2 + f(v)` for the 1-D pass.
struct Envelope {
    vertices: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            vertices: Vec::with_capacity(n),
            bounds: Vec::with_capacity(n + 1),
        }
    }

    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        self.vertices.clear();
        self.bounds.clear();
        for (q, &fq) in f.iter().enumerate() {
            if !fq.is_finite() {
                continue;
            }
            let qf = q as f64;
            loop {
                let Some(&v) = self.vertices.last() else {
                    self.vertices.push(q);
                    self.bounds.push(f64::NEG_INFINITY);
                    break;
                };
                let vf = v as f64;
                let s = ((fq + qf * qf) - (f[v] + vf * vf)) / (2.0 * qf - 2.0 * vf);
                if s <= *self.bounds.last().unwrap() {
                    self.vertices.pop();
                    self.bounds.pop();
                } else {
                    self.vertices.push(q);
                    self.bounds.push(s);
                    break;
                }
            }
        }
        if self.vertices.is_empty() {
            out.fill(f64::INFINITY);
            return;
        }
        let mut k = 0;
        for (q, slot) in out.iter_mut().enumerate() {
            let qf = q as f64;
            while k + 1 < self.vertices.len() && self.bounds[k + 1] < qf {
                k += 1;
            }
            let v = self.vertices[k];
            let dv = qf - v as f64;
            *slot = dv * dv + f[v];
        }
    }
}
