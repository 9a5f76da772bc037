//! Norm evaluators for the individual spaces.

use super::exponent::ExponentFunction;
use super::luxemburg::luxemburg;
use super::young::YoungFunction;
use crate::error::{Error, Result};
use crate::grid::{quadrature_ball_measure, BallShape, Grid, GridFunction, Region};
use crate::numeric::{lq_aggregate, pairwise_sum};
use crate::weights::Weight;

/// Cells of a region with per-cell measure `fraction * w * h^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub cells: Vec<usize>,
    pub measure: Vec<f64>,
}

impl Block {
    pub fn new(grid: &Grid, region: &Region, w: Option<&[f64]>) -> Self {
        let vol = grid.cell_volume();
        let (cells, measure) = grid
            .region_weights(region)
            .into_iter()
            .map(|(i, frac)| (i, frac * vol * w.map_or(1.0, |w| w[i])))
            .unzip();
        Block { cells, measure }
    }

    pub fn whole(grid: &Grid, w: Option<&[f64]>) -> Self {
        Self::new(grid, &Region::All, w)
    }

    /// `(sum |a_x f_x|^p mu_x)^{1/p}` for constant `p`, computed with rescaling.
    pub fn lp(&self, f: &[f64], factor: Option<&[f64]>, p: f64) -> f64 {
        let val = |k: usize| {
            let i = self.cells[k];
            (f[i] * factor.map_or(1.0, |a| a[i])).abs()
        };
        let scale = (0..self.cells.len()).map(val).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        if p.is_infinite() {
            return scale;
        }
        let terms: Vec<f64> = (0..self.cells.len()).map(|k| (val(k) / scale).powf(p) * self.measure[k]).collect();
        scale * pairwise_sum(&terms).powf(1.0 / p)
    }

    /// Variable exponent modular `sum (|a_x f_x| / lambda)^{p_x} mu_x`.
    pub fn modular(&self, f: &[f64], factor: Option<&[f64]>, p: &[f64], lambda: f64) -> f64 {
        let terms: Vec<f64> = self
            .cells
            .iter()
            .zip(&self.measure)
            .map(|(&i, &mu)| {
                let v = (f[i] * factor.map_or(1.0, |a| a[i])).abs();
                if v == 0.0 {
                    0.0
                } else {
                    (v / lambda).powf(p[i]) * mu
                }
            })
            .collect();
        pairwise_sum(&terms)
    }

    pub fn is_null(&self, f: &[f64]) -> bool {
        self.cells.iter().all(|&i| f[i] == 0.0)
    }
}

fn weight_slice(w: Option<&Weight>, f: &GridFunction) -> Result<Option<Vec<f64>>> {
    match w {
        None => Ok(None),
        Some(w) => {
            w.grid().check_same(f.grid())?;
            Ok(Some(w.values().to_vec()))
        }
    }
}

/// `(int |f|^p w)^{1/p}`.
pub fn weighted_lebesgue_norm(p: f64, w: Option<&Weight>, f: &GridFunction) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("L^p needs p >= 1, got {p}")));
    }
    let w = weight_slice(w, f)?;
    Ok(Block::whole(f.grid(), w.as_deref()).lp(f.values(), None, p))
}

/// Lorentz norm from the step rearrangement:
/// `(sum v_i^q (p/q)(t_i^{q/p} - t_{i-1}^{q/p}))^{1/q}`, `q = inf` giving `max v_i t_i^{1/p}`.
pub fn lorentz_norm(p: f64, q: f64, f: &GridFunction) -> f64 {
    let prof = f.rearrange();
    if q.is_infinite() {
        return prof.pieces().map(|(v, _, t)| v * t.powf(1.0 / p)).fold(0.0, f64::max);
    }
    let scale = prof.steps().first().map_or(0.0, |s| s.0);
    if scale == 0.0 {
        return 0.0;
    }
    let e = q / p;
    let terms: Vec<f64> = prof
        .pieces()
        .map(|(v, a, b)| (v / scale).powf(q) * (p / q) * (b.powf(e) - a.powf(e)))
        .collect();
    scale * pairwise_sum(&terms).powf(1.0 / q)
}

/// Dyadic annuli `C_k = B(2^k) \ B(2^{k-1})` centered at the origin and truncated to the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Annuli {
    /// `B(1)` for the non-homogeneous variant.
    pub head: Option<Region>,
    /// `(k, region)`; in the homogeneous case the first entry is the lumped ball `B(2^{k_min})`.
    pub blocks: Vec<(i32, Region)>,
    pub k_min: i32,
    pub k_max: i32,
}

impl Annuli {
    /// Homogeneous: `k` from `2 - L` (annulus width at least `2h`) to the smallest
    /// `k` with `B(2^k)` covering the box; the innermost ball is lumped into the
    /// first block. Non-homogeneous: head `B(1)` and `k = 1..=k_max`.
    pub fn new(grid: &Grid, homogeneous: bool) -> Self {
        let reach = grid.max_radius();
        let k_max = reach.log2().ceil() as i32;
        let ball = |r: f64| Region::Ball { center: [0.0; 2], radius: r, shape: BallShape::Euclidean };
        let ann = |k: i32| Region::Annulus {
            center: [0.0; 2],
            inner: 2f64.powi(k - 1),
            outer: 2f64.powi(k),
            shape: BallShape::Euclidean,
        };
        if homogeneous {
            let k_min = (2 - grid.level() as i32).min(k_max);
            let mut blocks = vec![(k_min, ball(2f64.powi(k_min)))];
            for k in k_min + 1..=k_max {
                blocks.push((k, ann(k)));
            }
            Annuli { head: None, blocks, k_min, k_max }
        } else {
            let blocks = (1..=k_max).map(|k| (k, ann(k))).collect();
            Annuli { head: Some(ball(1.0)), blocks, k_min: 1, k_max }
        }
    }
}

/// Homogeneous or non-homogeneous Herz norm.
pub fn herz_norm(alpha: f64, p: f64, q: f64, homogeneous: bool, f: &GridFunction) -> f64 {
    herz_with(&Annuli::new(f.grid(), homogeneous), alpha, p, q, f)
}

pub(crate) fn herz_with(annuli: &Annuli, alpha: f64, p: f64, q: f64, f: &GridFunction) -> f64 {
    let g = f.grid();
    let terms: Vec<f64> = annuli
        .blocks
        .iter()
        .map(|(k, region)| 2f64.powf(*k as f64 * alpha) * Block::new(g, region, None).lp(f.values(), None, p))
        .collect();
    let tail = lq_aggregate(&terms, q);
    match &annuli.head {
        Some(head) => Block::new(g, head, None).lp(f.values(), None, p) + tail,
        None => tail,
    }
}

fn variable_scale(block: &Block, f: &[f64], factor: Option<&[f64]>, p: &ExponentFunction) -> f64 {
    block.lp(f, factor, p.min()) + block.lp(f, factor, p.max())
}

/// Luxemburg norm of `a f` restricted to `block` in `L^{p(.)}(w)` (the weight is in the block measure).
pub(crate) fn block_variable_norm(
    block: &Block,
    f: &[f64],
    factor: Option<&[f64]>,
    p: &ExponentFunction,
    tol: f64,
) -> Result<f64> {
    if block.is_null(f) {
        return Ok(0.0);
    }
    if let Some(pc) = p.constant() {
        return Ok(block.lp(f, factor, pc));
    }
    let lambda0 = variable_scale(block, f, factor, p);
    luxemburg(|l| block.modular(f, factor, p.values(), l), lambda0, tol)
}

/// `inf { lambda : int (|f|/lambda)^{p(x)} w <= 1 }`.
pub fn variable_lebesgue_norm(p: &ExponentFunction, w: Option<&Weight>, f: &GridFunction, tol: f64) -> Result<f64> {
    p.function().grid().check_same(f.grid())?;
    let w = weight_slice(w, f)?;
    let block = Block::whole(f.grid(), w.as_deref());
    if block.is_null(f.values()) {
        return Ok(0.0);
    }
    let lambda0 = variable_scale(&block, f.values(), None, p);
    luxemburg(|l| block.modular(f.values(), None, p.values(), l), lambda0, tol)
}

/// A sequence term `a_j f` restricted to `block`.
#[derive(Clone, Copy, Debug)]
pub struct SequenceTerm<'a> {
    pub block: &'a Block,
    pub factor: Option<&'a [f64]>,
}

/// `l^{q(.)}(L^{p(.)}(w))` norm of `{a_j f chi_j}`: the infimum of `mu` with
/// `sum_j || |f_j / mu|^{q(.)} ||_{L^{p(.)/q(.)}(w)} <= 1`. Constant `q` reduces
/// to the `l^q` norm of the `L^{p(.)}(w)` norms.
pub fn mixed_sequence_norm(
    f: &[f64],
    terms: &[SequenceTerm<'_>],
    p: &ExponentFunction,
    q: &ExponentFunction,
    q_const: Option<f64>,
    tol: f64,
) -> Result<f64> {
    let inner: Vec<f64> = terms
        .iter()
        .map(|t| block_variable_norm(t.block, f, t.factor, p, tol))
        .collect::<Result<_>>()?;
    if let Some(qc) = q_const.or_else(|| q.constant()) {
        return Ok(lq_aggregate(&inner, qc));
    }
    if inner.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    // exponent p/q for the inner Luxemburg problems
    let pq = ExponentFunction::ratio(p, q)?;
    let active: Vec<&SequenceTerm<'_>> = terms.iter().zip(&inner).filter(|(_, v)| **v > 0.0).map(|(t, _)| t).collect();
    let rho = |mu: f64| -> f64 {
        let mut total = 0.0;
        for t in &active {
            let powered: Vec<f64> = (0..f.len())
                .map(|i| {
                    let v = (f[i] * t.factor.map_or(1.0, |a| a[i])).abs() / mu;
                    v.powf(q.values()[i])
                })
                .collect();
            match block_variable_norm(t.block, &powered, None, &pq, tol) {
                Ok(v) => total += v,
                Err(_) => return f64::NAN,
            }
        }
        total
    };
    let mu0 = lq_aggregate(&inner, q.min());
    luxemburg(rho, mu0, tol)
}

/// Evaluates the two-weighted variable Herz norm.
#[allow(clippy::too_many_arguments)]
pub fn variable_herz_norm(
    alpha: &ExponentFunction,
    p: &ExponentFunction,
    q: &ExponentFunction,
    v: Option<&Weight>,
    w: Option<&Weight>,
    homogeneous: bool,
    f: &GridFunction,
    tol: f64,
) -> Result<f64> {
    let prepared = VarHerzData::new(f.grid(), alpha, v, w, homogeneous)?;
    prepared.norm(f, p, q, tol)
}

/// Annulus blocks and `[v(B_k)]^{alpha(x)/n}` factors, reusable across functions.
#[derive(Clone, Debug)]
pub(crate) struct VarHerzData {
    head: Option<Block>,
    blocks: Vec<Block>,
    factors: Vec<Vec<f64>>,
}

impl VarHerzData {
    pub fn new(
        grid: &Grid,
        alpha: &ExponentFunction,
        v: Option<&Weight>,
        w: Option<&Weight>,
        homogeneous: bool,
    ) -> Result<Self> {
        let g = *grid;
        for x in [v, w].into_iter().flatten() {
            x.grid().check_same(&g)?;
        }
        let annuli = Annuli::new(&g, homogeneous);
        let wv = w.map(|w| w.values().to_vec());
        let n = g.dim() as f64;
        let mut blocks = Vec::new();
        let mut factors = Vec::new();
        for (k, region) in &annuli.blocks {
            let ball = Region::ball([0.0; 2], 2f64.powi(*k));
            let vb = match v {
                Some(v) => v.function().integrate(&ball),
                None => quadrature_ball_measure(&g, 2f64.powi(*k), BallShape::Euclidean),
            };
            factors.push(alpha.values().iter().map(|a| vb.powf(a / n)).collect());
            blocks.push(Block::new(&g, region, wv.as_deref()));
        }
        let head = annuli.head.map(|h| Block::new(&g, &h, wv.as_deref()));
        Ok(VarHerzData { head, blocks, factors })
    }

    pub fn norm(&self, f: &GridFunction, p: &ExponentFunction, q: &ExponentFunction, tol: f64) -> Result<f64> {
        let terms: Vec<SequenceTerm<'_>> = self
            .blocks
            .iter()
            .zip(&self.factors)
            .map(|(b, a)| SequenceTerm { block: b, factor: Some(a.as_slice()) })
            .collect();
        let tail = mixed_sequence_norm(f.values(), &terms, p, q, None, tol)?;
        let head = match &self.head {
            Some(b) => block_variable_norm(b, f.values(), None, p, tol)?,
            None => 0.0,
        };
        Ok(head + tail)
    }
}

/// Luxemburg-Nakano norm `inf { lambda : int Phi(|f|/lambda) <= 1 }`.
pub fn orlicz_norm(phi: &YoungFunction, f: &GridFunction, tol: f64) -> Result<f64> {
    let vol = f.grid().cell_volume();
    if f.is_zero() {
        return Ok(0.0);
    }
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let modular = |l: f64| {
        let terms: Vec<f64> = abs.iter().map(|&v| if v == 0.0 { 0.0 } else { phi.eval(v / l) }).collect();
        pairwise_sum(&terms) * vol
    };
    luxemburg(modular, f.lp_norm(2.0).max(f.sup() * 1e-3), tol)
}

/// `sup |B|^{1/r0 - 1/r} (int_{B cap box} |f|^r)^{1/r}` over balls centered at
/// grid nodes and cell centers with radii `h 2^m`, up to one covering the box.
pub fn morrey_norm(r0: f64, r: f64, f: &GridFunction) -> f64 {
    let g = *f.grid();
    let scale = f.sup();
    if scale == 0.0 {
        return 0.0;
    }
    let powered = f.map(|v| (v.abs() / scale).powf(r));
    let integ = powered.integrator();
    let diam = g.diameter(BallShape::Euclidean);
    let mut radii = vec![g.h()];
    while *radii.last().unwrap() < diam {
        radii.push(2.0 * radii.last().unwrap());
    }
    let measures: Vec<f64> = radii.iter().map(|&x| quadrature_ball_measure(&g, x, BallShape::Euclidean)).collect();
    let mut centers = g.centers();
    centers.extend(g.nodes());
    let e = 1.0 / r0 - 1.0 / r;
    let mut best: f64 = 0.0;
    for c in &centers {
        for (rad, m) in radii.iter().zip(&measures) {
            let local = integ.ball(*c, *rad, BallShape::Euclidean).max(0.0);
            best = best.max(m.powf(e) * local.powf(1.0 / r));
        }
    }
    scale * best
}

/// Besov-Bourgain-Morrey norm: `l^tau` over `nu` of the `l^r` over `m` of
/// `|Q_{nu,m}|^{1/p - 1/q} (int_Q |f|^q)^{1/q}`, for `nu` from the coarsest
/// level whose cubes span the box down to the grid level.
pub fn bbm_norm(p: f64, q: f64, r: f64, tau: f64, f: &GridFunction) -> f64 {
    let g = *f.grid();
    let scale = f.sup();
    if scale == 0.0 {
        return 0.0;
    }
    let n = g.dim();
    let extent = (0..n).map(|a| g.side(a)).fold(0.0, f64::max);
    let nu_min = -(extent.log2().ceil() as i32);
    let nu_max = g.level() as i32;
    let vol = g.cell_volume();
    let powered: Vec<f64> = f.values().iter().map(|v| (v.abs() / scale).powf(q) * vol).collect();
    let mut outer = Vec::new();
    for nu in nu_min..=nu_max {
        let side = 2f64.powi(-nu);
        let first: Vec<i64> = (0..n).map(|a| (g.lo(a) / side).floor() as i64).collect();
        let counts: Vec<usize> =
            (0..n).map(|a| ((g.hi(a) / side).ceil() as i64 - first[a]).max(1) as usize).collect();
        let total = counts.iter().product::<usize>();
        let mut bins = vec![Vec::new(); total];
        for (i, &v) in powered.iter().enumerate() {
            let c = g.center(i);
            let mut idx = 0;
            let mut stride = 1;
            for a in 0..n {
                let m = (c[a] / side).floor() as i64 - first[a];
                idx += m as usize * stride;
                stride *= counts[a];
            }
            bins[idx].push(v);
        }
        let factor = side.powi(n as i32).powf(1.0 / p - 1.0 / q);
        let inner: Vec<f64> = bins
            .iter()
            .filter(|b| !b.is_empty())
            .map(|b| factor * pairwise_sum(b).powf(1.0 / q))
            .collect();
        outer.push(lq_aggregate(&inner, r));
    }
    scale * lq_aggregate(&outer, tau)
}
