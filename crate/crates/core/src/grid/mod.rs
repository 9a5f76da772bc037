//! Uniform dyadic grids over bounded boxes in dimension 1 or 2, and the
//! cell-constant functions that live on them.

mod cubes;
mod function;
mod io;
mod region;

pub use cubes::{CubeFamily, CubeIndex};
pub(crate) use cubes::CellSums;
pub use function::{GridFunction, RearrangementProfile};
pub use io::{read_grid_function, write_grid_function, write_grid_function_csv};
pub use region::{quadrature_ball_measure, BallIntegrator, BallShape, Cube, Region};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Serialized form of a [`Grid`]: dimension, box and level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub level: u32,
}

/// A box `prod [a_i, b_i]` split into cells of side `h = 2^-level`.
///
/// Cells are stored with the first axis varying fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    level: u32,
    cells: [usize; 2],
}

impl Grid {
    pub const DEFAULT_MAX_CELLS: usize = 1 << 24;
    pub const MAX_LEVEL: u32 = 30;

    pub fn new(dim: usize, bounds: &[(f64, f64)], level: u32) -> Result<Self> {
        Self::with_max_cells(dim, bounds, level, Self::DEFAULT_MAX_CELLS)
    }

    pub fn with_max_cells(
        dim: usize,
        bounds: &[(f64, f64)],
        level: u32,
        max_cells: usize,
    ) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if bounds.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} box intervals, got {}",
                bounds.len()
            )));
        }
        if level > Self::MAX_LEVEL {
            return Err(Error::InvalidGrid(format!(
                "level {level} exceeds maximum {}",
                Self::MAX_LEVEL
            )));
        }
        let scale = (level as f64).exp2();
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        let mut cells = [1usize; 2];
        let mut total: usize = 1;
        for (axis, &(a, b)) in bounds.iter().enumerate() {
            if !(a.is_finite() && b.is_finite()) || b <= a {
                return Err(Error::InvalidGrid(format!("empty or infinite interval [{a}, {b}]")));
            }
            for end in [a, b] {
                let scaled = end * scale;
                if (scaled - scaled.round()).abs() > 1e-9 * scaled.abs().max(1.0) {
                    return Err(Error::InvalidGrid(format!(
                        "endpoint {end} is not a multiple of 2^-{level} (non-dyadic box)"
                    )));
                }
            }
            let count = ((b - a) * scale).round() as usize;
            lo[axis] = a;
            hi[axis] = b;
            cells[axis] = count;
            total = total.saturating_mul(count);
        }
        if total > max_cells {
            return Err(Error::TooManyCells { cells: total, max: max_cells });
        }
        Ok(Grid { dim, lo, hi, level, cells })
    }

    /// One-dimensional grid on `[lo, hi]`.
    pub fn line(lo: f64, hi: f64, level: u32) -> Result<Self> {
        Self::new(1, &[(lo, hi)], level)
    }

    /// Two-dimensional grid on `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64, level: u32) -> Result<Self> {
        Self::new(2, &[(lo, hi), (lo, hi)], level)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cell side `2^-level`.
    pub fn h(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> [usize; 2] {
        self.cells
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.lo[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.hi[axis]
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    /// Lebesgue measure of the box.
    pub fn measure(&self) -> f64 {
        (0..self.dim).map(|a| self.side(a)).product()
    }

    /// Diameter of the box measured in the metric of `shape`.
    pub fn diameter(&self, shape: BallShape) -> f64 {
        match shape {
            BallShape::Euclidean => (0..self.dim).map(|a| self.side(a).powi(2)).sum::<f64>().sqrt(),
            BallShape::Cube => (0..self.dim).map(|a| self.side(a)).fold(0.0, f64::max),
        }
    }

    /// Largest distance from the origin to a point of the box.
    pub fn max_radius(&self) -> f64 {
        (0..self.dim)
            .map(|a| self.lo[a].abs().max(self.hi[a].abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.cells[0] * j
    }

    pub fn coords(&self, idx: usize) -> [usize; 2] {
        [idx % self.cells[0], idx / self.cells[0]]
    }

    /// Center of cell `idx`; the unused coordinate is 0 for `n = 1`.
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let h = self.h();
        let c = self.coords(idx);
        let mut x = [0.0; 2];
        for (axis, slot) in x.iter_mut().enumerate().take(self.dim) {
            *slot = self.lo[axis] + (c[axis] as f64 + 0.5) * h;
        }
        x
    }

    pub fn centers(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|i| self.center(i)).collect()
    }

    /// Grid nodes (cell corners).
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let h = self.h();
        let mut out = Vec::new();
        let n1 = if self.dim == 2 { self.cells[1] + 1 } else { 1 };
        for j in 0..n1 {
            for i in 0..=self.cells[0] {
                let mut x = [self.lo[0] + i as f64 * h, 0.0];
                if self.dim == 2 {
                    x[1] = self.lo[1] + j as f64 * h;
                }
                out.push(x);
            }
        }
        out
    }

    /// Same box at the next finer level.
    pub fn refine(&self) -> Result<Grid> {
        let bounds: Vec<(f64, f64)> = (0..self.dim).map(|a| (self.lo[a], self.hi[a])).collect();
        Grid::new(self.dim, &bounds, self.level + 1)
    }

    /// Same box at another level.
    pub fn with_level(&self, level: u32) -> Result<Grid> {
        let bounds: Vec<(f64, f64)> = (0..self.dim).map(|a| (self.lo[a], self.hi[a])).collect();
        Grid::new(self.dim, &bounds, level)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            n: self.dim,
            bounds: (0..self.dim).map(|a| [self.lo[a], self.hi[a]]).collect(),
            level: self.level,
        }
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::IncompatibleGrid(format!("{:?} vs {:?}", self.spec(), other.spec())))
        }
    }
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;

    fn try_from(s: GridSpec) -> Result<Self> {
        let bounds: Vec<(f64, f64)> = s.bounds.iter().map(|b| (b[0], b[1])).collect();
        Grid::new(s.n, &bounds, s.level)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        g.spec()
    }
}
