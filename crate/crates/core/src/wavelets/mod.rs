//! Haar and Daubechies wavelet systems, coefficient analysis, the square
//! functions `V f` and `W_s f`, and partial-sum synthesis.
//!
//! Generators are sampled by the cascade algorithm and integrated exactly as
//! step (Haar) or piecewise-linear (Daubechies) functions on the cascade grid,
//! so inner products with cell-constant functions reduce to differences of
//! primitives.

mod analysis;
mod filters;

pub use analysis::{
    analyze, gram, partial_sum, square_function_v, square_function_w, BasisIndex, CoeffBlock, WaveletCoefficients,
};
pub use filters::{qmf_defect, Family, CASCADE_MAX_ITERATIONS, CASCADE_TOL};

use crate::error::{Error, Result};
use crate::grid::Grid;
use serde::{Deserialize, Serialize};

/// Serializable description of a system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletSpec {
    pub family: Family,
    /// Base level `J`.
    #[serde(default)]
    pub base_level: i32,
    /// Samples per unit are `2^cascade_level`.
    #[serde(default = "default_cascade")]
    pub cascade_level: u32,
}

fn default_cascade() -> u32 {
    12
}

impl Default for WaveletSpec {
    fn default() -> Self {
        WaveletSpec { family: Family::Haar, base_level: 0, cascade_level: default_cascade() }
    }
}

/// Which 1D factor a tensor generator uses along an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Phi,
    Psi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveletSystem {
    family: Family,
    dim: usize,
    base_level: i32,
    cascade_level: u32,
    taps: Vec<f64>,
    phi: Vec<f64>,
    psi: Vec<f64>,
    /// Haar samples are read as a step function, Daubechies samples are
    /// interpolated linearly.
    linear: bool,
    /// Cumulative integrals of the sample model at the sample points.
    phi_cum: Vec<f64>,
    psi_cum: Vec<f64>,
    cascade_iterations: usize,
    refinement_residual: f64,
}

fn cumulative(samples: &[f64], dx: f64, linear: bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in samples.windows(2) {
        acc += if linear { 0.5 * (w[0] + w[1]) * dx } else { w[0] * dx };
        out.push(acc);
    }
    out
}

/// Builds the system: validates the taps, runs the cascade, derives `psi`.
pub fn build_system(family: Family, dim: usize, base_level: i32, cascade_level: u32) -> Result<WaveletSystem> {
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dimension must be 1 or 2, got {dim}")));
    }
    if let Family::Daubechies(n) = family {
        if !(2..=4).contains(&n) {
            return Err(Error::InvalidParameter(format!("Daubechies order must be 2..=4, got {n}")));
        }
    }
    if cascade_level > 20 {
        return Err(Error::InvalidParameter(format!("cascade level {cascade_level} exceeds 20")));
    }
    let taps = family.taps();
    let defect = qmf_defect(&taps);
    if defect > 1e-12 {
        return Err(Error::ContractViolation(format!("filter taps of {family} violate orthonormality by {defect}")));
    }
    let (phi, psi, cascade_iterations, refinement_residual) = if family == Family::Haar {
        let per = 1usize << cascade_level;
        let phi: Vec<f64> = (0..=per).map(|m| if m < per { 1.0 } else { 0.0 }).collect();
        let psi = (0..=per).map(|m| if m < per / 2 { 1.0 } else if m < per { -1.0 } else { 0.0 }).collect();
        let residual = filters::refinement_residual(&taps, &phi, cascade_level);
        (phi, psi, 0, residual)
    } else {
        let (phi, it, residual) = filters::cascade(&taps, cascade_level)?;
        let psi = filters::mother(&phi, &family.high_pass(), cascade_level);
        (phi, psi, it, residual)
    };
    let linear = family != Family::Haar;
    let dx = (-(cascade_level as f64)).exp2();
    Ok(WaveletSystem {
        family,
        dim,
        base_level,
        cascade_level,
        linear,
        phi_cum: cumulative(&phi, dx, linear),
        psi_cum: cumulative(&psi, dx, linear),
        taps,
        phi,
        psi,
        cascade_iterations,
        refinement_residual,
    })
}

impl WaveletSpec {
    pub fn build(&self, dim: usize) -> Result<WaveletSystem> {
        build_system(self.family, dim, self.base_level, self.cascade_level)
    }
}

impl WaveletSystem {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base_level(&self) -> i32 {
        self.base_level
    }

    pub fn cascade_level(&self) -> u32 {
        self.cascade_level
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Holder exponent `K` of the generators.
    pub fn smoothness(&self) -> f64 {
        self.family.smoothness()
    }

    /// `2N - 1`
    pub fn support(&self) -> usize {
        self.family.support()
    }

    pub fn cascade_iterations(&self) -> usize {
        self.cascade_iterations
    }

    /// Sup-norm change in the last cascade step.
    pub fn refinement_residual(&self) -> f64 {
        self.refinement_residual
    }

    /// Samples at `m 2^-cascade_level`.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// Number of generators `2^n - 1`.
    pub fn generators(&self) -> usize {
        (1 << self.dim) - 1
    }

    /// Axis factors of generator `l`; `l = 0` is the scaling function and
    /// `l = 1, 2, 3` in 2D are `phi x psi`, `psi x phi`, `psi x psi`.
    pub fn factors(&self, l: usize) -> [Factor; 2] {
        use Factor::{Phi, Psi};
        match (self.dim, l) {
            (_, 0) => [Phi, Phi],
            (1, _) => [Psi, Phi],
            (_, 1) => [Phi, Psi],
            (_, 2) => [Psi, Phi],
            _ => [Psi, Psi],
        }
    }

    /// Finest usable detail level on `grid`: `L` for Haar, `L - 2` otherwise.
    pub fn max_level(&self, grid: &Grid) -> i32 {
        grid.level() as i32 - if self.family == Family::Haar { 0 } else { 2 }
    }

    /// Default `j_max = L - 2`, raised to the base level if needed.
    pub fn default_j_max(&self, grid: &Grid) -> i32 {
        (grid.level() as i32 - 2).max(self.base_level)
    }

    fn step(&self, factor: Factor) -> (&[f64], &[f64]) {
        match factor {
            Factor::Phi => (&self.phi, &self.phi_cum),
            Factor::Psi => (&self.psi, &self.psi_cum),
        }
    }

    /// Value of the sampled unit generator at `t`.
    pub fn value(&self, factor: Factor, t: f64) -> f64 {
        let (s, _) = self.step(factor);
        let x = t * (self.cascade_level as f64).exp2();
        if x < 0.0 || x >= (s.len() - 1) as f64 {
            return 0.0;
        }
        let m = x.floor() as usize;
        if self.linear {
            s[m] + (x - m as f64) * (s[m + 1] - s[m])
        } else {
            s[m]
        }
    }

    /// `int_0^t` of the sampled unit generator, exact for the sample model.
    pub fn primitive(&self, factor: Factor, t: f64) -> f64 {
        let (s, cum) = self.step(factor);
        let x = t * (self.cascade_level as f64).exp2();
        if x <= 0.0 {
            return 0.0;
        }
        let last = cum.len() - 1;
        if x >= last as f64 {
            return cum[last];
        }
        let m = x.floor() as usize;
        let frac = x - m as f64;
        if frac == 0.0 {
            return cum[m];
        }
        let dx = (-(self.cascade_level as f64)).exp2();
        if self.linear {
            cum[m] + dx * frac * (s[m] + 0.5 * frac * (s[m + 1] - s[m]))
        } else {
            cum[m] + dx * frac * s[m]
        }
    }

    /// Range of translations `k` along `axis` whose support `2^-j (k + [0, S])` meets the box.
    pub fn k_range(&self, grid: &Grid, axis: usize, j: i32) -> (i64, i64) {
        if axis >= grid.dim() {
            return (0, 0);
        }
        let s = (j as f64).exp2();
        let lo = (grid.lo(axis) * s - self.support() as f64).floor() as i64 + 1;
        let hi = (grid.hi(axis) * s).ceil() as i64 - 1;
        (lo, hi)
    }

    /// Integrals of `2^{j/2} F(2^j x - k)` over the cells along `axis`, as
    /// `(first cell, values)`.
    pub(crate) fn cell_integrals(&self, grid: &Grid, axis: usize, factor: Factor, j: i32, k: i64) -> (usize, Vec<f64>) {
        if axis >= grid.dim() {
            return (0, vec![1.0]);
        }
        let h = grid.h();
        let s = (j as f64).exp2();
        let lo = grid.lo(axis);
        let cells = grid.shape()[axis];
        let a = k as f64 / s;
        let b = (k as f64 + self.support() as f64) / s;
        let first = (((a - lo) / h).floor().max(0.0) as usize).min(cells);
        let last = (((b - lo) / h).ceil().max(0.0) as usize).min(cells);
        let scale = s.sqrt() / s;
        let mut prev = self.primitive(factor, (lo + first as f64 * h) * s - k as f64);
        let mut out = Vec::with_capacity(last.saturating_sub(first));
        for i in first..last {
            let cur = self.primitive(factor, (lo + (i + 1) as f64 * h) * s - k as f64);
            out.push(scale * (cur - prev));
            prev = cur;
        }
        (first, out)
    }
}

#[cfg(test)]
mod tests;
