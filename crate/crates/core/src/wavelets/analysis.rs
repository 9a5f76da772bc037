use super::{Factor, WaveletSystem};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Coefficients of one generator `l` at one level `j` (`l = 0` is the scaling block).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffBlock {
    pub l: usize,
    pub j: i32,
    pub k_lo: [i64; 2],
    pub counts: [usize; 2],
    /// First axis fastest.
    pub values: Vec<f64>,
}

impl CoeffBlock {
    pub fn get(&self, k: [i64; 2]) -> Option<f64> {
        let a = usize::try_from(k[0] - self.k_lo[0]).ok()?;
        let b = usize::try_from(k[1] - self.k_lo[1]).ok()?;
        (a < self.counts[0] && b < self.counts[1]).then(|| self.values[a + self.counts[0] * b])
    }

    pub fn entries(&self) -> impl Iterator<Item = ([i64; 2], f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| {
            let a = (i % self.counts[0]) as i64;
            let b = (i / self.counts[0]) as i64;
            ([self.k_lo[0] + a, self.k_lo[1] + b], *v)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveletCoefficients {
    pub dim: usize,
    pub base_level: i32,
    pub j_max: i32,
    /// Scaling block first, then details ordered by `(j, l)`.
    pub blocks: Vec<CoeffBlock>,
}

/// Identifies `phi_{J,k}` (`l = 0`) or `psi^l_{j,k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub l: usize,
    pub j: i32,
    pub k: [i64; 2],
}

impl WaveletCoefficients {
    pub fn scaling(&self) -> &CoeffBlock {
        &self.blocks[0]
    }

    pub fn details(&self) -> impl Iterator<Item = &CoeffBlock> {
        self.blocks[1..].iter()
    }

    pub fn get(&self, index: BasisIndex) -> Option<f64> {
        self.blocks.iter().find(|b| b.l == index.l && b.j == index.j).and_then(|b| b.get(index.k))
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.blocks.iter().flat_map(|b| &b.values).map(|v| v * v).sum()
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.values.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sparse CSV `l,j,k1[,k2],value` of the nonzero coefficients.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.dim == 1 { "l,j,k1,value\n" } else { "l,j,k1,k2,value\n" });
        for b in &self.blocks {
            for (k, v) in b.entries().filter(|(_, v)| *v != 0.0) {
                if self.dim == 1 {
                    let _ = writeln!(out, "{},{},{},{:e}", b.l, b.j, k[0], v);
                } else {
                    let _ = writeln!(out, "{},{},{},{},{:e}", b.l, b.j, k[0], k[1], v);
                }
            }
        }
        out
    }
}

type AxisTable = Vec<(usize, Vec<f64>)>;

fn axis_tables(sys: &WaveletSystem, grid: &Grid, l: usize, j: i32) -> ([i64; 2], [usize; 2], [AxisTable; 2]) {
    let factors = sys.factors(l);
    let mut k_lo = [0i64; 2];
    let mut counts = [1usize; 2];
    let tables = [0usize, 1].map(|axis| {
        let (lo, hi) = sys.k_range(grid, axis, j);
        k_lo[axis] = lo;
        counts[axis] = (hi - lo + 1).max(0) as usize;
        (lo..=hi).map(|k| sys.cell_integrals(grid, axis, factors[axis], j, k)).collect::<AxisTable>()
    });
    (k_lo, counts, tables)
}

fn analyze_block(f: &GridFunction, sys: &WaveletSystem, l: usize, j: i32) -> CoeffBlock {
    let g = f.grid();
    let [n0, n1] = g.shape();
    let (k_lo, counts, [t0, t1]) = axis_tables(sys, g, l, j);
    let v = f.values();
    // contract along the first axis: partial[k0][i1]
    let partial: Vec<Vec<f64>> = t0
        .iter()
        .map(|(first, w)| {
            (0..n1)
                .map(|i1| w.iter().enumerate().map(|(d, wi)| wi * v[first + d + n0 * i1]).sum())
                .collect()
        })
        .collect();
    let mut values = vec![0.0; counts[0] * counts[1]];
    for (b, (first, w)) in t1.iter().enumerate() {
        for (a, row) in partial.iter().enumerate() {
            values[a + counts[0] * b] = w.iter().enumerate().map(|(d, wi)| wi * row[first + d]).sum();
        }
    }
    CoeffBlock { l, j, k_lo, counts, values }
}

/// Inner products of `f` (zero outside the box) with `phi_{J,k}` and
/// `psi^l_{j,k}` for `J <= j <= j_max`.
pub fn analyze(f: &GridFunction, sys: &WaveletSystem, j_max: i32) -> Result<WaveletCoefficients> {
    let g = f.grid();
    if g.dim() != sys.dim() {
        return Err(Error::IncompatibleGrid(format!("grid is {}D, system is {}D", g.dim(), sys.dim())));
    }
    let deepest = sys.max_level(g);
    if j_max > deepest {
        return Err(Error::InvalidParameter(format!(
            "j_max = {j_max} is finer than the grid allows ({deepest} for {} at level {})",
            sys.family(),
            g.level()
        )));
    }
    if j_max < sys.base_level() {
        return Err(Error::InvalidParameter(format!("j_max = {j_max} is below the base level {}", sys.base_level())));
    }
    let mut jobs = vec![(0, sys.base_level())];
    for j in sys.base_level()..=j_max {
        for l in 1..=sys.generators() {
            jobs.push((l, j));
        }
    }
    let blocks = jobs.par_iter().map(|&(l, j)| analyze_block(f, sys, l, j)).collect();
    Ok(WaveletCoefficients { dim: sys.dim(), base_level: sys.base_level(), j_max, blocks })
}

fn block_layer(block: &CoeffBlock, grid: &Grid, weight: f64) -> Vec<f64> {
    let n = grid.dim() as i32;
    let scale = (block.j as f64 * n as f64 / 2.0).exp2() * weight;
    let s = (block.j as f64).exp2();
    (0..grid.len())
        .map(|i| {
            let c = grid.center(i);
            let k = [0, 1].map(|a| if a < grid.dim() { (c[a] * s).floor() as i64 } else { 0 });
            let v = block.get(k).unwrap_or(0.0) * scale;
            v * v
        })
        .collect()
}

fn root_sum(grid: &Grid, layers: impl Iterator<Item = Vec<f64>>) -> GridFunction {
    let mut acc = vec![0.0; grid.len()];
    for layer in layers {
        for (a, v) in acc.iter_mut().zip(layer) {
            *a += v;
        }
    }
    GridFunction::from_vec(*grid, acc.into_iter().map(f64::sqrt).collect())
}

/// `(sum_k |<f, phi_{J,k}> chi_{J,k}|^2)^{1/2}` with `chi_{j,k} = 2^{jn/2} chi_{Q_{j,k}}`.
/// Cubes `Q_{j,k}` outside the box do not contribute.
pub fn square_function_v(coeffs: &WaveletCoefficients, grid: &Grid) -> GridFunction {
    root_sum(grid, std::iter::once(block_layer(coeffs.scaling(), grid, 1.0)))
}

/// `(sum_{l,j,k} |2^{js} <f, psi^l_{j,k}> chi_{j,k}|^2)^{1/2}`.
pub fn square_function_w(coeffs: &WaveletCoefficients, grid: &Grid, s: f64) -> Result<GridFunction> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("smoothness s must be >= 0, got {s}")));
    }
    Ok(root_sum(grid, coeffs.details().map(|b| block_layer(b, grid, (b.j as f64 * s).exp2()))))
}

fn synthesize_block(block: &CoeffBlock, sys: &WaveletSystem, grid: &Grid, out: &mut [f64]) {
    let [n0, _] = grid.shape();
    let (_, _, [t0, t1]) = axis_tables(sys, grid, block.l, block.j);
    let inv = 1.0 / grid.cell_volume();
    // partial[b][i0] = sum_a c[a, b] t0[a][i0]
    for (b, (first1, w1)) in t1.iter().enumerate() {
        let mut row = vec![0.0; n0];
        for (a, (first0, w0)) in t0.iter().enumerate() {
            let c = block.values[a + block.counts[0] * b];
            if c == 0.0 {
                continue;
            }
            for (d, w) in w0.iter().enumerate() {
                row[first0 + d] += c * w;
            }
        }
        for (d, w) in w1.iter().enumerate() {
            let i1 = first1 + d;
            for (i0, r) in row.iter().enumerate() {
                out[i0 + n0 * i1] += r * w * inv;
            }
        }
    }
}

/// Cell averages of `sum_k <f,phi_{J,k}> phi_{J,k} + sum_{l, j <= j_cut, k} <f,psi^l_{j,k}> psi^l_{j,k}`.
pub fn partial_sum(coeffs: &WaveletCoefficients, sys: &WaveletSystem, grid: &Grid, j_cut: i32) -> Result<GridFunction> {
    if j_cut > coeffs.j_max {
        return Err(Error::InvalidParameter(format!("j_cut = {j_cut} exceeds j_max = {}", coeffs.j_max)));
    }
    let layers: Vec<Vec<f64>> = coeffs
        .blocks
        .par_iter()
        .filter(|b| b.l == 0 || b.j <= j_cut)
        .map(|b| {
            let mut out = vec![0.0; grid.len()];
            synthesize_block(b, sys, grid, &mut out);
            out
        })
        .collect();
    let mut acc = vec![0.0; grid.len()];
    for layer in layers {
        for (a, v) in acc.iter_mut().zip(layer) {
            *a += v;
        }
    }
    Ok(GridFunction::from_vec(*grid, acc))
}

fn factor_inner(sys: &WaveletSystem, a: (Factor, i32, i64), b: (Factor, i32, i64)) -> f64 {
    let fine = a.1.max(b.1);
    // midpoints at twice the sample density of the finer factor
    let res = sys.cascade_level() as i32 + fine + 1;
    let dx = (-(res as f64)).exp2();
    let support = sys.support() as f64;
    let lo = (a.2 as f64 / (a.1 as f64).exp2()).max(b.2 as f64 / (b.1 as f64).exp2());
    let hi = ((a.2 as f64 + support) / (a.1 as f64).exp2()).min((b.2 as f64 + support) / (b.1 as f64).exp2());
    if hi <= lo {
        return 0.0;
    }
    let m0 = (lo / dx).floor() as i64;
    let m1 = (hi / dx).ceil() as i64;
    let eval = |f: (Factor, i32, i64), x: f64| {
        let s = (f.1 as f64).exp2();
        s.sqrt() * sys.value(f.0, s * x - f.2 as f64)
    };
    let terms: Vec<f64> = (m0..m1)
        .map(|m| {
            let x = (m as f64 + 0.5) * dx;
            eval(a, x) * eval(b, x) * dx
        })
        .collect();
    crate::numeric::pairwise_sum(&terms)
}

/// Gram matrix of the sampled generators by midpoint quadrature.
pub fn gram(sys: &WaveletSystem, indices: &[BasisIndex]) -> Vec<Vec<f64>> {
    let inner = |p: &BasisIndex, q: &BasisIndex| {
        let (fp, fq) = (sys.factors(p.l), sys.factors(q.l));
        (0..sys.dim()).map(|axis| factor_inner(sys, (fp[axis], p.j, p.k[axis]), (fq[axis], q.j, q.k[axis]))).product()
    };
    indices.iter().map(|p| indices.iter().map(|q| inner(p, q)).collect()).collect()
}
