use super::Weight;
use crate::error::{Error, Result};
use crate::grid::{CellSums, Cube, CubeFamily, CubeIndex};
use crate::operators::MaximalKind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Lower estimate of `[w]_{A_p}` over a finite cube family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApEstimate {
    pub p: f64,
    pub family: CubeFamily,
    pub value: f64,
    /// First cube (in family order) attaining `value`.
    pub witness: Cube,
    pub witness_index: CubeIndex,
    pub cubes: usize,
}

/// `max over Q of avg_Q w * (avg_Q w^{-1/(p-1)})^{p-1}`.
pub fn ap_constant(w: &Weight, p: f64, family: &CubeFamily) -> Result<ApEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("A_p needs 1 < p < inf, got {p}")));
    }
    let g = *w.grid();
    let cubes = family.enumerate(&g)?;
    let w_sums = CellSums::new(&g, w.values());
    let sigma: Vec<f64> = w.values().iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    let s_sums = CellSums::new(&g, &sigma);
    let values: Vec<f64> = cubes
        .par_iter()
        .map(|c| w_sums.mean(c) * s_sums.mean(c).powf(p - 1.0))
        .collect();
    let (best, value) = argmax(&values);
    Ok(ApEstimate {
        p,
        family: *family,
        value,
        witness: cubes[best].to_cube(&g),
        witness_index: cubes[best],
        cubes: cubes.len(),
    })
}

/// Index and value of the maximum; ties keep the first.
pub(crate) fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    (best, values[best])
}

/// `max over cells of M w / w` for the given maximal operator.
pub fn a1_constant(w: &Weight, kind: &MaximalKind) -> Result<f64> {
    let m = kind.apply(w.function())?;
    Ok(m.values().iter().zip(w.values()).map(|(a, b)| a / b).fold(0.0, f64::max))
}

/// `sigma = w^{1-p'} = w^{-1/(p-1)}`.
pub fn dual_weight(w: &Weight, p: f64) -> Result<Weight> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("dual weight needs 1 < p < inf, got {p}")));
    }
    w.powf(-1.0 / (p - 1.0))
}
