use crate::error::{Error, Result};
use crate::grid::{quadrature_ball_measure, BallShape, CellSums, CubeFamily, GridFunction};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Cap on the number of maximal-operator iterates.
pub const MAX_ITERATES: usize = 64;

/// How ball integrals are normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide by `|B(x, r)|`.
    #[default]
    Measure,
    /// Divide by `r^n`.
    Radius,
}

/// Radii tried at each point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusLadder {
    /// `h 2^m` up to the box diameter.
    #[default]
    Dyadic,
    /// Every half-integer multiple of `h` in 1D (which attains the supremum
    /// over all radii for cell-constant functions), steps of `h/2` in 2D.
    Exhaustive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaximalOptions {
    pub normalization: Normalization,
    pub shape: BallShape,
    pub radii: RadiusLadder,
}

impl MaximalOptions {
    pub fn radius() -> Self {
        MaximalOptions { normalization: Normalization::Radius, ..Default::default() }
    }

    pub fn exhaustive() -> Self {
        MaximalOptions { radii: RadiusLadder::Exhaustive, ..Default::default() }
    }
}

/// Which maximal operator to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaximalKind {
    /// Centered balls (or l^inf balls) at every cell center.
    Centered(MaximalOptions),
    /// Uncentered supremum of averages over the cubes of a family containing the point.
    DyadicCubes(CubeFamily),
}

impl Default for MaximalKind {
    fn default() -> Self {
        MaximalKind::Centered(MaximalOptions::default())
    }
}

impl MaximalKind {
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        match self {
            MaximalKind::Centered(o) => Ok(maximal_with(f, o)),
            MaximalKind::DyadicCubes(family) => dyadic_cube_maximal(f, family),
        }
    }
}

/// Centered maximal function with the default dyadic ladder and Euclidean balls.
pub fn maximal(f: &GridFunction, normalization: Normalization) -> GridFunction {
    maximal_with(f, &MaximalOptions { normalization, ..Default::default() })
}

pub fn maximal_with(f: &GridFunction, opts: &MaximalOptions) -> GridFunction {
    let g = *f.grid();
    let n = g.dim();
    let h = g.h();
    let abs = f.abs();
    let integ = abs.integrator();
    let diam = g.diameter(opts.shape);
    let radii: Vec<f64> = match opts.radii {
        RadiusLadder::Dyadic => {
            let mut r = vec![h];
            while *r.last().unwrap() < diam {
                let next = 2.0 * r.last().unwrap();
                r.push(next);
            }
            r
        }
        RadiusLadder::Exhaustive => {
            let step = 0.5 * h;
            let count = (diam / step).ceil() as usize + 2;
            if n == 1 {
                (0..count).filter(|m| m % 2 == 1).map(|m| m as f64 * step).collect()
            } else {
                (1..=count).map(|m| m as f64 * step).collect()
            }
        }
    };
    let unit = opts.shape.unit_volume(n);
    let factor = match opts.normalization {
        Normalization::Measure => 1.0,
        Normalization::Radius => unit,
    };
    let measures: Vec<f64> = radii.iter().map(|&r| quadrature_ball_measure(&g, r, opts.shape)).collect();
    let values: Vec<f64> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let c = g.center(i);
            let mut best = abs.values()[i];
            for (k, &r) in radii.iter().enumerate() {
                let avg = integ.ball(c, r, opts.shape) / measures[k];
                if avg > best {
                    best = avg;
                }
            }
            factor * best
        })
        .collect();
    GridFunction::from_vec(g, values)
}

/// `M^l f`; `M^0 f = |f|`.
pub fn iterate_maximal(f: &GridFunction, l: usize, kind: &MaximalKind) -> Result<GridFunction> {
    if l > MAX_ITERATES {
        return Err(Error::InvalidParameter(format!("iterate count {l} exceeds cap {MAX_ITERATES}")));
    }
    let mut out = f.abs();
    for _ in 0..l {
        out = kind.apply(&out)?;
    }
    Ok(out)
}

/// `sup { avg_Q |f| : Q in family, x in Q }` at every cell.
pub fn dyadic_cube_maximal(f: &GridFunction, family: &CubeFamily) -> Result<GridFunction> {
    let g = *f.grid();
    let abs = f.abs();
    let sums = CellSums::new(&g, abs.values());
    let mut out = vec![0.0f64; g.len()];
    for cube in family.enumerate(&g)? {
        let avg = sums.mean(&cube);
        for i in cube.cell_indices(&g) {
            if avg > out[i] {
                out[i] = avg;
            }
        }
    }
    Ok(GridFunction::from_vec(g, out))
}
