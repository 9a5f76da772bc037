use super::{Cube, Grid};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A finite family of grid-aligned cubes inside the box.
///
/// Level `l` contains the cubes `2^-l (k + [0,1]^n)` lying inside the box. With
/// `shifted`, each level below the grid level also contains the translates by
/// half a side along every nonempty subset of axes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeFamily {
    /// Coarsest level; defaults to the coarsest level that fits in the box.
    #[serde(default)]
    pub min_level: Option<i32>,
    /// Finest level; defaults to the grid level (single cells).
    #[serde(default)]
    pub max_level: Option<i32>,
    #[serde(default = "yes")]
    pub shifted: bool,
}

fn yes() -> bool {
    true
}

/// A cube of a [`CubeFamily`] in cell coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubeIndex {
    pub level: i32,
    /// Bit `a` set when the cube is shifted by half a side along axis `a`.
    pub offset: u8,
    /// First cell of the cube along each axis.
    pub start: [usize; 2],
    /// Side in cells.
    pub cells: usize,
}

impl CubeFamily {
    pub fn dyadic() -> Self {
        CubeFamily { min_level: None, max_level: None, shifted: false }
    }

    pub fn with_shifts() -> Self {
        CubeFamily { min_level: None, max_level: None, shifted: true }
    }

    /// Resolved `(min_level, max_level)` for `grid`.
    pub fn levels(&self, grid: &Grid) -> Result<(i32, i32)> {
        let l = grid.level() as i32;
        let fit = (0..grid.dim()).map(|a| grid.side(a)).fold(f64::INFINITY, f64::min);
        let coarsest = -(fit.log2().floor() as i32);
        let lo = self.min_level.unwrap_or(coarsest).max(coarsest);
        let hi = self.max_level.unwrap_or(l).min(l);
        if lo > hi {
            return Err(Error::InvalidParameter(format!(
                "cube family has no levels between {lo} and {hi}"
            )));
        }
        Ok((lo, hi))
    }

    /// All cubes of the family in lexicographic `(level, offset, start[1], start[0])` order.
    pub fn enumerate(&self, grid: &Grid) -> Result<Vec<CubeIndex>> {
        let (lo, hi) = self.levels(grid)?;
        let l = grid.level() as i32;
        let h = grid.h();
        let n = grid.dim();
        let shape = grid.shape();
        let mut out = Vec::new();
        for level in lo..=hi {
            let cells = 1usize << (l - level);
            let side = cells as f64 * h;
            let offsets: Vec<u8> = if self.shifted && level < l { (0..(1u8 << n)).collect() } else { vec![0] };
            for &offset in &offsets {
                // first lattice start (in cells) along each axis
                let mut first = [0usize; 2];
                let mut count = [1usize; 2];
                for axis in 0..n {
                    let shift = if offset & (1 << axis) != 0 { 0.5 * side } else { 0.0 };
                    let k0 = ((grid.lo(axis) - shift) / side).ceil();
                    let s = ((k0 * side + shift - grid.lo(axis)) / h).round() as usize;
                    first[axis] = s;
                    count[axis] = if s + cells <= shape[axis] { (shape[axis] - s - cells) / cells + 1 } else { 0 };
                }
                for b in 0..count[1] {
                    for a in 0..count[0] {
                        out.push(CubeIndex {
                            level,
                            offset,
                            start: [first[0] + a * cells, if n == 2 { first[1] + b * cells } else { 0 }],
                            cells,
                        });
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidParameter("cube family is empty".into()));
        }
        Ok(out)
    }
}

impl CubeIndex {
    pub fn to_cube(&self, grid: &Grid) -> Cube {
        let h = grid.h();
        let mut lo = [0.0; 2];
        for (axis, v) in lo.iter_mut().enumerate().take(grid.dim()) {
            *v = grid.lo(axis) + self.start[axis] as f64 * h;
        }
        Cube { lo, side: self.cells as f64 * h }
    }

    /// Storage indices of the cells making up the cube.
    pub fn cell_indices(&self, grid: &Grid) -> impl Iterator<Item = usize> + '_ {
        let rows = if grid.dim() == 2 { self.cells } else { 1 };
        let g = *grid;
        (0..rows).flat_map(move |b| (0..self.cells).map(move |a| g.index(self.start[0] + a, self.start[1] + b)))
    }
}

/// Summed-area table for exact averages over grid-aligned cubes.
#[derive(Clone, Debug)]
pub(crate) struct CellSums {
    dim: usize,
    width: usize,
    table: Vec<f64>,
}

impl CellSums {
    pub fn new(grid: &Grid, values: &[f64]) -> Self {
        let [n0, n1] = grid.shape();
        let width = n0 + 1;
        if grid.dim() == 1 {
            let mut table = vec![0.0; width];
            for i in 0..n0 {
                table[i + 1] = table[i] + values[i];
            }
            return CellSums { dim: 1, width, table };
        }
        let mut table = vec![0.0; width * (n1 + 1)];
        for j in 0..n1 {
            let mut row = 0.0;
            for i in 0..n0 {
                row += values[i + n0 * j];
                table[(j + 1) * width + i + 1] = table[j * width + i + 1] + row;
            }
        }
        CellSums { dim: 2, width, table }
    }

    /// Mean of the cell values over the cube.
    pub fn mean(&self, c: &CubeIndex) -> f64 {
        let [i, j] = c.start;
        let m = c.cells;
        if self.dim == 1 {
            return (self.table[i + m] - self.table[i]) / m as f64;
        }
        let s = |a: usize, b: usize| self.table[b * self.width + a];
        (s(i + m, j + m) - s(i, j + m) - s(i + m, j) + s(i, j)) / (m * m) as f64
    }
}
