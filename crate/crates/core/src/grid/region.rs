use super::Grid;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Metric used for balls: `Euclidean` is the l^2 ball, `Cube` the l^inf ball.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallShape {
    #[default]
    Euclidean,
    Cube,
}

impl BallShape {
    /// Measure of the unit ball in dimension `n`.
    pub fn unit_volume(self, n: usize) -> f64 {
        match (self, n) {
            (_, 1) => 2.0,
            (BallShape::Euclidean, 2) => PI,
            (BallShape::Cube, 2) => 4.0,
            _ => unreachable!("dimension is 1 or 2"),
        }
    }

    pub fn volume(self, n: usize, r: f64) -> f64 {
        self.unit_volume(n) * r.powi(n as i32)
    }
}

/// Measure of `B(c, r)` in the quadrature used by [`Grid::region_weights`] and
/// [`BallIntegrator`], for `c` a cell center or a grid node (with no clipping).
///
/// Equals `shape.volume(n, r)` except for 2D Euclidean discs, where the sub-row
/// rule is used so that averages of constants are exact.
pub fn quadrature_ball_measure(grid: &Grid, r: f64, shape: BallShape) -> f64 {
    if grid.dim() == 1 || shape == BallShape::Cube {
        return shape.volume(grid.dim(), r);
    }
    if r <= 0.0 {
        return 0.0;
    }
    let sub = grid.h() / DISC_SUBROWS as f64;
    // sub-row midlines sit at odd multiples of sub/2 from any center or node
    let mut total = 0.0;
    let mut t = 0usize;
    loop {
        let dy = (t as f64 + 0.5) * sub;
        if dy >= r {
            break;
        }
        total += 2.0 * 2.0 * (r * r - dy * dy).sqrt() * sub;
        t += 1;
    }
    total
}

/// Axis-aligned cube `lo + [0, side]^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub lo: [f64; 2],
    pub side: f64,
}

impl Cube {
    pub fn region(&self, n: usize) -> Region {
        let mut hi = self.lo;
        for v in hi.iter_mut().take(n) {
            *v += self.side;
        }
        Region::Box { lo: self.lo, hi }
    }

    pub fn volume(&self, n: usize) -> f64 {
        self.side.powi(n as i32)
    }
}

/// An integration region. Partially covered cells count with their covered fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    All,
    Box { lo: [f64; 2], hi: [f64; 2] },
    Ball { center: [f64; 2], radius: f64, shape: BallShape },
    /// `B(center, outer) \ B(center, inner)`.
    Annulus { center: [f64; 2], inner: f64, outer: f64, shape: BallShape },
}

impl Region {
    pub fn ball(center: [f64; 2], radius: f64) -> Self {
        Region::Ball { center, radius, shape: BallShape::Euclidean }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Region::Box { lo: [a, 0.0], hi: [b, 0.0] }
    }
}

/// Sub-rows per cell row used to resolve Euclidean discs in 2D.
pub(crate) const DISC_SUBROWS: usize = 8;

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

/// Range of cell indices along `axis` meeting `[a, b]`.
fn cell_range(grid: &Grid, axis: usize, a: f64, b: f64) -> std::ops::Range<usize> {
    let h = grid.h();
    let n = grid.shape()[axis];
    let lo = grid.lo(axis);
    let s = ((a - lo) / h).floor().max(0.0);
    let e = ((b - lo) / h).ceil().max(0.0);
    let s = (s as usize).min(n);
    let e = (e as usize).min(n);
    s..e.max(s)
}

impl Grid {
    /// Cells meeting `region` with the fraction of each cell that lies inside,
    /// in increasing cell order.
    pub fn region_weights(&self, region: &Region) -> Vec<(usize, f64)> {
        match *region {
            Region::All => (0..self.len()).map(|i| (i, 1.0)).collect(),
            Region::Box { lo, hi } => self.box_weights(lo, hi),
            Region::Ball { center, radius, shape } => self.ball_weights(center, radius, shape),
            Region::Annulus { center, inner, outer, shape } => {
                let outer_w = self.ball_weights(center, outer, shape);
                let inner_w = self.ball_weights(center, inner, shape);
                let mut j = 0;
                let mut out = Vec::with_capacity(outer_w.len());
                for (idx, w) in outer_w {
                    while j < inner_w.len() && inner_w[j].0 < idx {
                        j += 1;
                    }
                    let cut = if j < inner_w.len() && inner_w[j].0 == idx { inner_w[j].1 } else { 0.0 };
                    let frac = (w - cut).max(0.0);
                    if frac > 0.0 {
                        out.push((idx, frac));
                    }
                }
                out
            }
        }
    }

    fn box_weights(&self, lo: [f64; 2], hi: [f64; 2]) -> Vec<(usize, f64)> {
        let h = self.h();
        let mut out = Vec::new();
        let xr = cell_range(self, 0, lo[0], hi[0]);
        let yr = if self.dim() == 2 { cell_range(self, 1, lo[1], hi[1]) } else { 0..1 };
        for j in yr {
            let fy = if self.dim() == 2 {
                let y0 = self.lo(1) + j as f64 * h;
                overlap(y0, y0 + h, lo[1], hi[1]) / h
            } else {
                1.0
            };
            if fy <= 0.0 {
                continue;
            }
            for i in xr.clone() {
                let x0 = self.lo(0) + i as f64 * h;
                let f = fy * overlap(x0, x0 + h, lo[0], hi[0]) / h;
                if f > 0.0 {
                    out.push((self.index(i, j), f));
                }
            }
        }
        out
    }

    fn ball_weights(&self, c: [f64; 2], r: f64, shape: BallShape) -> Vec<(usize, f64)> {
        if r <= 0.0 {
            return Vec::new();
        }
        if self.dim() == 1 || shape == BallShape::Cube {
            return self.box_weights([c[0] - r, c[1] - r], [c[0] + r, c[1] + r]);
        }
        let h = self.h();
        let sub = h / DISC_SUBROWS as f64;
        let xr = cell_range(self, 0, c[0] - r, c[0] + r);
        let mut row = vec![0.0; xr.len()];
        let mut out = Vec::new();
        for j in cell_range(self, 1, c[1] - r, c[1] + r) {
            row.iter_mut().for_each(|v| *v = 0.0);
            let y0 = self.lo(1) + j as f64 * h;
            for s in 0..DISC_SUBROWS {
                let dy = y0 + (s as f64 + 0.5) * sub - c[1];
                let w2 = r * r - dy * dy;
                if w2 <= 0.0 {
                    continue;
                }
                let w = w2.sqrt();
                for (slot, i) in row.iter_mut().zip(xr.clone()) {
                    let x0 = self.lo(0) + i as f64 * h;
                    *slot += overlap(x0, x0 + h, c[0] - w, c[0] + w) / h / DISC_SUBROWS as f64;
                }
            }
            for (slot, i) in row.iter().zip(xr.clone()) {
                if *slot > 0.0 {
                    out.push((self.index(i, j), *slot));
                }
            }
        }
        out
    }
}

/// Prefix-sum tables for fast integrals of a fixed function over many balls and boxes.
///
/// Results agree with [`Grid::region_weights`] up to rounding.
#[derive(Clone, Debug)]
pub struct BallIntegrator {
    grid: Grid,
    /// 1D: cumulative integral at nodes. 2D: summed-area table at nodes, x fastest.
    table: Vec<f64>,
    /// 2D only: per-row cumulative integral along x (units of value times length).
    rows: Vec<f64>,
}

impl BallIntegrator {
    pub fn new(grid: Grid, values: &[f64]) -> Self {
        assert_eq!(values.len(), grid.len(), "values do not match grid");
        let h = grid.h();
        let [n0, n1] = grid.shape();
        if grid.dim() == 1 {
            let mut table = Vec::with_capacity(n0 + 1);
            let mut acc = 0.0;
            table.push(0.0);
            for v in values {
                acc += v * h;
                table.push(acc);
            }
            return BallIntegrator { grid, table, rows: Vec::new() };
        }
        let w = n0 + 1;
        let mut rows = vec![0.0; n1 * w];
        for j in 0..n1 {
            let mut acc = 0.0;
            for i in 0..n0 {
                acc += values[i + n0 * j] * h;
                rows[j * w + i + 1] = acc;
            }
        }
        let mut table = vec![0.0; w * (n1 + 1)];
        for j in 0..n1 {
            for i in 0..=n0 {
                table[(j + 1) * w + i] = table[j * w + i] + rows[j * w + i] * h;
            }
        }
        BallIntegrator { grid, table, rows }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn frac_pos(&self, axis: usize, x: f64) -> (usize, f64) {
        let n = self.grid.shape()[axis];
        let t = ((x - self.grid.lo(axis)) / self.grid.h()).clamp(0.0, n as f64);
        let i = (t.floor() as usize).min(n - 1);
        (i, t - i as f64)
    }

    fn cum_1d(&self, x: f64) -> f64 {
        let (i, t) = self.frac_pos(0, x);
        self.table[i] + t * (self.table[i + 1] - self.table[i])
    }

    fn row_cum(&self, j: usize, x: f64) -> f64 {
        let w = self.grid.shape()[0] + 1;
        let (i, t) = self.frac_pos(0, x);
        let r = &self.rows[j * w..(j + 1) * w];
        r[i] + t * (r[i + 1] - r[i])
    }

    fn sat(&self, x: f64, y: f64) -> f64 {
        let w = self.grid.shape()[0] + 1;
        let (i, tx) = self.frac_pos(0, x);
        let (j, ty) = self.frac_pos(1, y);
        let s = |a: usize, b: usize| self.table[b * w + a];
        let bottom = s(i, j) + tx * (s(i + 1, j) - s(i, j));
        let top = s(i, j + 1) + tx * (s(i + 1, j + 1) - s(i, j + 1));
        bottom + ty * (top - bottom)
    }

    fn box_integral(&self, lo: [f64; 2], hi: [f64; 2]) -> f64 {
        if self.grid.dim() == 1 {
            if hi[0] <= lo[0] {
                return 0.0;
            }
            return self.cum_1d(hi[0]) - self.cum_1d(lo[0]);
        }
        if hi[0] <= lo[0] || hi[1] <= lo[1] {
            return 0.0;
        }
        self.sat(hi[0], hi[1]) - self.sat(lo[0], hi[1]) - self.sat(hi[0], lo[1]) + self.sat(lo[0], lo[1])
    }

    /// Integral over `B(c, r)` intersected with the box.
    pub fn ball(&self, c: [f64; 2], r: f64, shape: BallShape) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if self.grid.dim() == 1 || shape == BallShape::Cube {
            return self.box_integral([c[0] - r, c[1] - r], [c[0] + r, c[1] + r]);
        }
        let h = self.grid.h();
        let sub = h / DISC_SUBROWS as f64;
        let mut total = 0.0;
        for j in cell_range(&self.grid, 1, c[1] - r, c[1] + r) {
            let y0 = self.grid.lo(1) + j as f64 * h;
            for s in 0..DISC_SUBROWS {
                let dy = y0 + (s as f64 + 0.5) * sub - c[1];
                let w2 = r * r - dy * dy;
                if w2 > 0.0 {
                    let w = w2.sqrt();
                    total += (self.row_cum(j, c[0] + w) - self.row_cum(j, c[0] - w)) * sub;
                }
            }
        }
        total
    }

    pub fn integral(&self, region: &Region) -> f64 {
        match *region {
            Region::All => *self.table.last().unwrap(),
            Region::Box { lo, hi } => self.box_integral(lo, hi),
            Region::Ball { center, radius, shape } => self.ball(center, radius, shape),
            Region::Annulus { center, inner, outer, shape } => {
                self.ball(center, outer, shape) - self.ball(center, inner, shape)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(grid: &Grid, values: &[f64], region: &Region) -> f64 {
        grid.region_weights(region).iter().map(|&(i, f)| values[i] * f).sum::<f64>() * grid.cell_volume()
    }

    #[test]
    fn interval_weights_clip_partial_cells() {
        let g = Grid::line(0.0, 1.0, 2).unwrap();
        let w = g.region_weights(&Region::interval(0.125, 0.5));
        assert_eq!(w, vec![(0, 0.5), (1, 1.0)]);
    }

    #[test]
    fn disc_weights_sum_to_area() {
        let g = Grid::square(-2.0, 2.0, 5).unwrap();
        let w = g.region_weights(&Region::ball([0.1, -0.2], 1.0));
        let area: f64 = w.iter().map(|p| p.1).sum::<f64>() * g.cell_volume();
        assert!((area - PI).abs() < 2e-4, "{area}");
    }

    #[test]
    fn quadrature_disc_measure_matches_weights() {
        let g = Grid::square(-2.0, 2.0, 3).unwrap();
        for r in [0.125, 0.3, 1.0, 1.7] {
            for c in [g.center(g.index(15, 16)), [0.0, 0.0]] {
                let w: f64 = g.region_weights(&Region::ball(c, r)).iter().map(|p| p.1).sum::<f64>() * g.cell_volume();
                assert!((w - quadrature_ball_measure(&g, r, BallShape::Euclidean)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn annuli_telescope() {
        let g = Grid::square(-4.0, 4.0, 3).unwrap();
        let whole: f64 = g.region_weights(&Region::ball([0.0; 2], 4.0)).iter().map(|p| p.1).sum();
        let mut parts: f64 = g.region_weights(&Region::ball([0.0; 2], 0.5)).iter().map(|p| p.1).sum();
        for k in 0..3 {
            let r = 0.5 * 2f64.powi(k);
            let ann = Region::Annulus { center: [0.0; 2], inner: r, outer: 2.0 * r, shape: BallShape::Euclidean };
            parts += g.region_weights(&ann).iter().map(|p| p.1).sum::<f64>();
        }
        assert!((whole - parts).abs() < 1e-9);
    }

    #[test]
    fn integrator_matches_weights() {
        let g1 = Grid::line(-2.0, 2.0, 4).unwrap();
        let v1: Vec<f64> = (0..g1.len()).map(|i| ((i * 7) % 5) as f64 - 1.5).collect();
        let b1 = BallIntegrator::new(g1, &v1);
        for (c, r) in [(0.03, 0.4), (-1.9, 1.0), (1.0, 5.0)] {
            let reg = Region::ball([c, 0.0], r);
            assert!((b1.integral(&reg) - direct(&g1, &v1, &reg)).abs() < 1e-12);
        }
        let g2 = Grid::square(-1.0, 1.0, 3).unwrap();
        let v2: Vec<f64> = (0..g2.len()).map(|i| ((i * 13) % 7) as f64).collect();
        let b2 = BallIntegrator::new(g2, &v2);
        for shape in [BallShape::Euclidean, BallShape::Cube] {
            for (c, r) in [([0.1, 0.2], 0.3), ([-0.9, 0.95], 0.7), ([0.0, 0.0], 3.0)] {
                let reg = Region::Ball { center: c, radius: r, shape };
                let (a, b) = (b2.integral(&reg), direct(&g2, &v2, &reg));
                assert!((a - b).abs() < 1e-11, "{shape:?} {a} {b}");
            }
        }
    }
}
