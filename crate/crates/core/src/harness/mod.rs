//! Verification checks comparing both sides of weighted, extrapolated and
//! wavelet norm inequalities on concrete probe batteries.
//!
//! Every check is a pure function of its inputs and returns a
//! [`VerificationReport`]; probes are evaluated in parallel and merged in
//! battery order, so equal inputs give byte-identical reports.

mod extrapolation;
mod proof_chain;
mod vector;
mod wavelet;

pub use extrapolation::{extrapolation_check, validation_weights, ExtrapolationOptions};
pub use proof_chain::{proof_chain_check, proof_chain_suite, random_triple, young_constant, ProofChainOptions};
pub use vector::{
    riesz_boundedness_check, translated_indicators, vector_valued_check, RieszOptions, VectorOptions,
};
pub use wavelet::{
    convergence_check, square_sum, Combine, wavelet_equivalence_check, ConvergenceOptions, EquivalenceOptions,
};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, Region};
use crate::operators::MaximalKind;
use crate::report::VerificationReport;
use crate::wavelets::WaveletSpec;
use rand::{Rng, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type NamedProbe = (String, GridFunction);

/// Registered checks with a one-line parameter summary, in stable order.
pub const CHECKS: [(&str, &str); 7] = [
    ("axioms", "space, seed: lattice-norm axioms on the standard battery"),
    ("extrapolation", "space, family {generator, n, battery}, p, growth_budget: C_emp = max |f|_X / |g|_X"),
    ("proof_chain", "space, p list, triples, alpha, epsilon, seed: slack of every step of the extrapolation argument"),
    ("wavelet_equivalence", "space, wavelet, s, battery, budget, drift_budget: |Vf + W_s f|_X / |(1-Lap)^{s/2} f|_X"),
    ("convergence", "space, wavelet, probe, schedule, tol: |f - partial sum|_X along j_cut"),
    ("vector_valued", "space, r, sizes, width, drift_budget: |(sum (Mf_j)^r)^{1/r}|_X / |(sum |f_j|^r)^{1/r}|_X"),
    ("riesz_boundedness", "space, battery, eps_cells, agreement: max_j |R_j f|_X / |f|_X"),
];

/// One group of probes in a battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeSpec {
    /// Ball indicators with random centers and radii in `[side/32, side/8]`.
    Indicators { count: usize },
    /// `(1 - |x - c|^2 / r^2)_+^2` with the same random centers and radii.
    Smooth { count: usize },
    /// Nonnegative random cell values.
    Random { count: usize },
    /// Cubes of side `width` evenly spaced along the first axis.
    Translates { count: usize, width: f64 },
}

impl ProbeSpec {
    fn count(&self) -> usize {
        match self {
            ProbeSpec::Indicators { count }
            | ProbeSpec::Smooth { count }
            | ProbeSpec::Random { count }
            | ProbeSpec::Translates { count, .. } => *count,
        }
    }

    fn doubled(&self) -> Self {
        let mut out = self.clone();
        match &mut out {
            ProbeSpec::Indicators { count }
            | ProbeSpec::Smooth { count }
            | ProbeSpec::Random { count }
            | ProbeSpec::Translates { count, .. } => *count *= 2,
        }
        out
    }
}

/// Probe battery. All probes are supported in the middle half of the box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Battery {
    pub seed: u64,
    pub probes: Vec<ProbeSpec>,
}

impl Default for Battery {
    fn default() -> Self {
        Battery { seed: 0, probes: vec![ProbeSpec::Indicators { count: 8 }, ProbeSpec::Smooth { count: 4 }] }
    }
}

/// `(lo, hi)` of the middle half of the box along each axis.
pub fn middle_half(grid: &Grid) -> [(f64, f64); 2] {
    [0, 1].map(|a| {
        if a < grid.dim() {
            let q = grid.side(a) / 4.0;
            (grid.lo(a) + q, grid.hi(a) - q)
        } else {
            (0.0, 0.0)
        }
    })
}

/// True when `f` vanishes at every cell whose center lies outside the middle half.
pub fn in_middle_half(f: &GridFunction) -> bool {
    let g = f.grid();
    let mh = middle_half(g);
    f.values().iter().enumerate().all(|(i, v)| {
        let c = g.center(i);
        *v == 0.0 || (0..g.dim()).all(|a| c[a] >= mh[a].0 && c[a] <= mh[a].1)
    })
}

impl Battery {
    pub fn new(seed: u64, probes: Vec<ProbeSpec>) -> Self {
        Battery { seed, probes }
    }

    pub fn len(&self) -> usize {
        self.probes.iter().map(ProbeSpec::count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same groups with twice the count. The first half of each group is unchanged.
    pub fn doubled(&self) -> Self {
        Battery { seed: self.seed, probes: self.probes.iter().map(ProbeSpec::doubled).collect() }
    }

    /// Materializes the probes on `grid`, ids `<kind><i>` in group order.
    pub fn generate(&self, grid: &Grid) -> Result<Vec<(String, GridFunction)>> {
        let g = *grid;
        let n = g.dim();
        let mh = middle_half(&g);
        let side = (0..n).map(|a| g.side(a)).fold(f64::INFINITY, f64::min);
        let mut out = Vec::with_capacity(self.len());
        for (s, spec) in self.probes.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(s as u64 + 1)));
            let ball = |rng: &mut ChaCha8Rng| {
                let r = (side * rng.gen_range(1.0 / 32.0..1.0 / 8.0)).max(g.h());
                let c = [0, 1].map(|a| {
                    if a < n {
                        let (lo, hi) = (mh[a].0 + r + g.h(), mh[a].1 - r - g.h());
                        if hi > lo { rng.gen_range(lo..hi) } else { (mh[a].0 + mh[a].1) / 2.0 }
                    } else {
                        0.0
                    }
                });
                (c, r)
            };
            match spec {
                ProbeSpec::Indicators { count } => {
                    for i in 0..*count {
                        let (c, r) = ball(&mut rng);
                        let f = GridFunction::constant(g, 1.0).restrict(&Region::ball(c, r));
                        out.push((format!("indicator{i}"), f));
                    }
                }
                ProbeSpec::Smooth { count } => {
                    for i in 0..*count {
                        let (c, r) = ball(&mut rng);
                        let f = GridFunction::from_fn(g, |x| {
                            let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
                            (1.0 - d2 / (r * r)).max(0.0).powi(2)
                        })?;
                        out.push((format!("smooth{i}"), f));
                    }
                }
                ProbeSpec::Random { count } => {
                    for i in 0..*count {
                        let vals = (0..g.len())
                            .map(|k| {
                                let v: f64 = rng.gen();
                                let x = g.center(k);
                                if (0..n).all(|a| x[a] >= mh[a].0 && x[a] <= mh[a].1) { v } else { 0.0 }
                            })
                            .collect();
                        out.push((format!("random{i}"), GridFunction::new(g, vals)?));
                    }
                }
                ProbeSpec::Translates { count, width } => {
                    for (i, f) in translated_indicators(&g, *count, *width)?.into_iter().enumerate() {
                        out.push((format!("translate{i}"), f));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Seeded split into (training, held-out) with `train_fraction` of the probes in training.
    pub fn split(&self, grid: &Grid, train_fraction: f64) -> Result<(Vec<NamedProbe>, Vec<NamedProbe>)> {
        if !(0.0..1.0).contains(&train_fraction) {
            return Err(Error::InvalidParameter(format!("train fraction must be in [0, 1), got {train_fraction}")));
        }
        let probes = self.generate(grid)?;
        let mut order: Vec<usize> = (0..probes.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed_5b11));
        let n_train = (probes.len() as f64 * train_fraction).round() as usize;
        let mut slots: Vec<Option<(String, GridFunction)>> = probes.into_iter().map(Some).collect();
        let mut take = |ix: &[usize]| -> Vec<(String, GridFunction)> {
            let mut ix = ix.to_vec();
            ix.sort_unstable();
            ix.into_iter().filter_map(|i| slots[i].take()).collect()
        };
        let train = take(&order[..n_train]);
        let held = take(&order[n_train..]);
        Ok((train, held))
    }
}

/// `N(t) = a t^b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NFunction {
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
}

fn one() -> f64 {
    1.0
}

impl NFunction {
    pub fn linear(a: f64) -> Self {
        NFunction { a, b: 1.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.a * t.powf(self.b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite() && self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "N(t) = a t^b needs a > 0 and b >= 0, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

/// How `(f, g)` pairs are produced from a probe `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairGenerator {
    /// `(M u, u)`
    MaximalPairs {
        #[serde(default)]
        kind: MaximalKind,
    },
    /// `(R_j u, u)` for every axis `j`, truncated at `eps_cells * h`.
    RieszPairs {
        #[serde(default = "one")]
        eps_cells: f64,
    },
    /// `(Vu + W_s u, (1 - Lap)^{s/2} u)` and the reverse order.
    WaveletPairs {
        #[serde(default)]
        wavelet: WaveletSpec,
        #[serde(default)]
        s: f64,
    },
    /// `(u, u)`
    Identity,
    /// One fixed pair given by expressions in `x1`, `x2`, `r`; the battery is ignored.
    Custom { f: String, g: String },
}

impl PairGenerator {
    pub fn tag(&self) -> &'static str {
        match self {
            PairGenerator::MaximalPairs { .. } => "maximal_pairs",
            PairGenerator::RieszPairs { .. } => "riesz_pairs",
            PairGenerator::WaveletPairs { .. } => "wavelet_pairs",
            PairGenerator::Identity => "identity",
            PairGenerator::Custom { .. } => "custom",
        }
    }

    /// Default `N` for the generator; large enough for the validation weights.
    pub fn default_n(&self) -> NFunction {
        match self {
            PairGenerator::MaximalPairs { .. } => NFunction::linear(4.0),
            PairGenerator::RieszPairs { .. } => NFunction::linear(16.0),
            PairGenerator::WaveletPairs { .. } => NFunction::linear(8.0),
            PairGenerator::Identity | PairGenerator::Custom { .. } => NFunction::linear(1.0),
        }
    }
}

/// A pair family: generator, the function `N` in the defining weighted
/// inequality, and the probe battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFamily {
    #[serde(flatten)]
    pub generator: PairGenerator,
    #[serde(default)]
    pub n: Option<NFunction>,
    #[serde(default)]
    pub battery: Battery,
}

impl PairFamily {
    pub fn new(generator: PairGenerator, battery: Battery) -> Self {
        PairFamily { generator, n: None, battery }
    }

    pub fn n_function(&self) -> NFunction {
        self.n.unwrap_or_else(|| self.generator.default_n())
    }

    /// `(id, f, g)` triples on `grid`.
    pub fn pairs(&self, grid: &Grid) -> Result<Vec<(String, GridFunction, GridFunction)>> {
        self.pairs_from(grid, &self.battery)
    }

    pub(crate) fn pairs_from(&self, grid: &Grid, battery: &Battery) -> Result<Vec<(String, GridFunction, GridFunction)>> {
        use rayon::prelude::*;
        if let PairGenerator::Custom { f, g } = &self.generator {
            let f = GridFunction::sample(&crate::expr::Expr::parse(f)?, *grid)?;
            let g = GridFunction::sample(&crate::expr::Expr::parse(g)?, *grid)?;
            return Ok(vec![("custom".into(), f, g)]);
        }
        let probes = battery.generate(grid)?;
        let sys = match &self.generator {
            PairGenerator::WaveletPairs { wavelet, .. } => Some(wavelet.build(grid.dim())?),
            _ => None,
        };
        let per: Vec<Result<Vec<(String, GridFunction, GridFunction)>>> = probes
            .par_iter()
            .map(|(id, u)| -> Result<Vec<_>> {
                Ok(match &self.generator {
                    PairGenerator::MaximalPairs { kind } => vec![(id.clone(), kind.apply(u)?, u.clone())],
                    PairGenerator::RieszPairs { eps_cells } => (0..grid.dim())
                        .map(|axis| {
                            let r = crate::operators::riesz(u, axis, eps_cells * grid.h())?;
                            Ok((format!("{id}_R{}", axis + 1), r, u.clone()))
                        })
                        .collect::<Result<_>>()?,
                    PairGenerator::WaveletPairs { s, .. } => {
                        let sys = sys.as_ref().expect("built above");
                        let sq = square_sum(u, sys, *s, None, Combine::Sum)?;
                        let b = crate::operators::bessel_potential(u, *s, crate::operators::BesselDirection::Forward)?;
                        vec![(format!("{id}_fwd"), sq.clone(), b.clone()), (format!("{id}_rev"), b, sq)]
                    }
                    PairGenerator::Identity => vec![(id.clone(), u.clone(), u.clone())],
                    PairGenerator::Custom { .. } => unreachable!(),
                })
            })
            .collect();
        let mut out = Vec::new();
        for p in per {
            out.extend(p?);
        }
        Ok(out)
    }
}

/// `max(a / b, b / a)`, with 1 for two zeros and infinity for one.
pub(crate) fn drift(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else if a <= 0.0 || b <= 0.0 {
        f64::INFINITY
    } else {
        (a / b).max(b / a)
    }
}

pub(crate) fn base_report(check: &str, config: serde_json::Value) -> VerificationReport {
    let mut r = VerificationReport::new(check);
    r.config = config;
    r
}

#[cfg(test)]
mod tests;
