use super::Weight;
use crate::error::{Error, Result};
use crate::grid::{BallShape, GridFunction, Region};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Balls `B(c, r)` for every listed center and radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub centers: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
    #[serde(default)]
    pub shape: BallShape,
}

/// How sub-boxes `E` of a ball `B` are chosen: boxes of measure `|B| 2^-m` for
/// `m = 1..=levels` anchored at each corner and the center of the inscribed
/// cube, plus `random` seeded sub-boxes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetSampler {
    pub levels: u32,
    pub random: usize,
    pub seed: u64,
}

impl Default for SubsetSampler {
    fn default() -> Self {
        SubsetSampler { levels: 8, random: 16, seed: 0 }
    }
}

/// A `(B, E)` pair and the quantities entering the fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingPair {
    pub center: [f64; 2],
    pub radius: f64,
    pub sub_lo: [f64; 2],
    pub sub_hi: [f64; 2],
    pub measure_ratio: f64,
    pub weight_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingEstimate {
    pub c: f64,
    /// Smallest `p_v` with `v(B)/v(E) <= C (|B|/|E|)^{p_v}` on every pair.
    pub p_v: f64,
    /// Largest `delta` with `v(E)/v(B) <= C (|E|/|B|)^delta` on every pair.
    pub delta: f64,
    pub p_v_witness: DoublingPair,
    pub delta_witness: DoublingPair,
    pub pairs: usize,
}

/// Fits the doubling exponents of `v` over `(B, E)` pairs with `E` a sub-box of `B`.
///
/// Measures are quadrature measures, so `v = 1` gives exactly `p_v = delta = 1` at `C = 1`.
pub fn doubling_exponents(
    v: &Weight,
    family: &BallFamily,
    sampler: &SubsetSampler,
    c: f64,
) -> Result<DoublingEstimate> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("doubling constant must be positive, got {c}")));
    }
    let g = *v.grid();
    let n = g.dim();
    let one = GridFunction::constant(g, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut pairs = Vec::new();
    for center in &family.centers {
        for &r in &family.radii {
            let ball = Region::Ball { center: *center, radius: r, shape: family.shape };
            let vb = v.function().integrate(&ball);
            let mb = one.integrate(&ball);
            if mb <= 0.0 {
                continue;
            }
            // inscribed cube half-side
            let a = match (family.shape, n) {
                (BallShape::Euclidean, 2) => r / 2f64.sqrt(),
                _ => r,
            };
            let mut subs: Vec<([f64; 2], [f64; 2])> = Vec::new();
            for m in 1..=sampler.levels {
                let side = 2.0 * a * (-(m as f64) / n as f64).exp2();
                let anchors: &[[f64; 2]] = if n == 1 {
                    &[[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]]
                } else {
                    &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]]
                };
                for t in anchors {
                    let mut lo = [0.0; 2];
                    let mut hi = [0.0; 2];
                    for k in 0..n {
                        lo[k] = center[k] - a + t[k] * (2.0 * a - side);
                        hi[k] = lo[k] + side;
                    }
                    subs.push((lo, hi));
                }
            }
            for _ in 0..sampler.random {
                let mut lo = [0.0; 2];
                let mut hi = [0.0; 2];
                for k in 0..n {
                    let x: f64 = rng.gen_range(-a..a);
                    let y: f64 = rng.gen_range(-a..a);
                    lo[k] = center[k] + x.min(y);
                    hi[k] = center[k] + x.max(y);
                }
                subs.push((lo, hi));
            }
            for (lo, hi) in subs {
                let e = Region::Box { lo, hi };
                let me = one.integrate(&e);
                let ve = v.function().integrate(&e);
                if me <= 0.0 || ve <= 0.0 || me >= mb * (1.0 - 1e-12) {
                    continue;
                }
                pairs.push(DoublingPair {
                    center: *center,
                    radius: r,
                    sub_lo: lo,
                    sub_hi: hi,
                    measure_ratio: mb / me,
                    weight_ratio: vb / ve,
                });
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("degenerate ball family: no (B, E) pairs".into()));
    }
    let lc = c.ln();
    let pv = |q: &DoublingPair| (q.weight_ratio.ln() - lc) / q.measure_ratio.ln();
    // v(E)/v(B) <= C (|E|/|B|)^d  <=>  d <= (ln(v(B)/v(E)) + ln C) / ln(|B|/|E|)
    let dl = |q: &DoublingPair| (q.weight_ratio.ln() + lc) / q.measure_ratio.ln();
    let mut ip = 0;
    let mut id = 0;
    for (i, q) in pairs.iter().enumerate() {
        if pv(q) > pv(&pairs[ip]) {
            ip = i;
        }
        if dl(q) < dl(&pairs[id]) {
            id = i;
        }
    }
    Ok(DoublingEstimate {
        c,
        p_v: pv(&pairs[ip]),
        delta: dl(&pairs[id]),
        p_v_witness: pairs[ip].clone(),
        delta_witness: pairs[id].clone(),
        pairs: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::weights::WeightSpec;

    #[test]
    fn lebesgue_measure_has_unit_exponents() {
        let g = Grid::line(-4.0, 4.0, 7).unwrap();
        let fam = BallFamily { centers: vec![[0.0, 0.0], [1.0, 0.0]], radii: vec![0.5, 1.0, 2.0], shape: BallShape::Euclidean };
        let est = doubling_exponents(&Weight::one(g), &fam, &SubsetSampler::default(), 1.0).unwrap();
        assert!((est.p_v - 1.0).abs() < 1e-9);
        assert!((est.delta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn linear_weight_doubles_like_r_squared() {
        let g = Grid::line(-4.0, 4.0, 12).unwrap();
        let v = WeightSpec::Power { alpha: 1.0 }.build(&g).unwrap();
        let fam = BallFamily { centers: vec![[0.0, 0.0]], radii: vec![1.0, 2.0], shape: BallShape::Euclidean };
        let sampler = SubsetSampler { levels: 8, random: 0, seed: 1 };
        let est = doubling_exponents(&v, &fam, &sampler, 1.0).unwrap();
        // E = [0, eps]: v(B)/v(E) = 2 r^2 / eps^2 = (|B|/|E|)^2 / 2
        assert!(est.p_v > 1.8 && est.p_v <= 2.0 + 1e-6, "{}", est.p_v);
        assert!(est.delta <= 1.0 + 1e-9);
    }
}
