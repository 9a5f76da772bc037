use super::norms::{Annuli, Block};
use super::Space;
use crate::error::Result;
use crate::grid::{GridFunction, Region};
use serde::{Deserialize, Serialize};

/// `|f chi_{E_j}|_X` along a sequence of sets.
pub fn absolute_continuity_probe(space: &Space, f: &GridFunction, sets: &[Region]) -> Result<Vec<f64>> {
    sets.iter().map(|e| space.norm(&f.restrict(e))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub k: i32,
    pub l: i32,
    /// `|chi_k|_X / |chi_l|_X`
    pub ratio: f64,
    /// `|C_k| / |C_l|`
    pub measure_ratio: f64,
    /// `log(ratio) / log(measure_ratio)`
    pub exponent: f64,
}

/// Norms of annulus indicators and the exponents fitted to their ratios.
/// With `C = 1`, `ratio <= measure_ratio^delta` holds for every `delta <= delta_lower`,
/// and `ratio >= measure_ratio^delta` for every `delta >= delta_upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioProfile {
    pub norms: Vec<(i32, f64)>,
    pub rows: Vec<RatioRow>,
    pub delta_lower: f64,
    pub delta_upper: f64,
}

/// Evaluates `|chi_{C_k}|_X` for the homogeneous annuli with `k` in `[k_from, k_to]`.
pub fn characteristic_ratio_profile(space: &Space, k_from: i32, k_to: i32) -> Result<RatioProfile> {
    let g = *space.grid();
    let annuli = Annuli::new(&g, true);
    let mut entries = Vec::new();
    for (k, region) in annuli.blocks.iter().filter(|(k, _)| (k_from..=k_to).contains(k)) {
        let chi = GridFunction::constant(g, 1.0).restrict(region);
        let measure: f64 = Block::new(&g, region, None).measure.iter().sum();
        if measure > 0.0 {
            entries.push((*k, space.norm(&chi)?, measure));
        }
    }
    let mut rows = Vec::new();
    for (a, &(k, nk, mk)) in entries.iter().enumerate() {
        for &(l, nl, ml) in &entries[a..] {
            let ratio = nk / nl;
            let measure_ratio = mk / ml;
            let exponent = if k == l { f64::NAN } else { ratio.ln() / measure_ratio.ln() };
            rows.push(RatioRow { k, l, ratio, measure_ratio, exponent });
        }
    }
    let fitted = rows.iter().map(|r| r.exponent).filter(|e| e.is_finite());
    let delta_lower = fitted.clone().fold(f64::INFINITY, f64::min);
    let delta_upper = fitted.fold(f64::NEG_INFINITY, f64::max);
    Ok(RatioProfile {
        norms: entries.iter().map(|&(k, n, _)| (k, n)).collect(),
        rows,
        delta_lower,
        delta_upper,
    })
}
