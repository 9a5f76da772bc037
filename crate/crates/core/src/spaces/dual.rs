use super::{Space, SpaceSpec};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numeric::conjugate;
use serde::{Deserialize, Serialize};

/// The associate space where an explicit formula is known.
pub fn kothe_dual(spec: &SpaceSpec) -> Result<SpaceSpec> {
    match spec {
        SpaceSpec::WeightedLebesgue { p, weight } if *p > 1.0 => {
            let pc = conjugate(*p);
            Ok(SpaceSpec::WeightedLebesgue { p: pc, weight: weight.clone().powered(1.0 - pc) })
        }
        SpaceSpec::Lorentz { p, q } if *p > 1.0 => Ok(SpaceSpec::Lorentz { p: conjugate(*p), q: conjugate(*q) }),
        other => Err(Error::Unsupported(format!(
            "no explicit associate space for {} with these parameters; use a pairing lower bound",
            other.tag()
        ))),
    }
}

/// `lhs = int |fg|`, `rhs = |f|_X |g|_X'`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl Pairing {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Pairing { lhs, rhs, ratio }
    }
}

/// Holder pairing against the explicit dual of `space`.
pub fn pairing_check(space: &Space, f: &GridFunction, g: &GridFunction) -> Result<Pairing> {
    let dual = Space::build(&kothe_dual(space.spec())?, space.grid())?.with_tol(space.tol());
    pairing_check_with(space, f, g, dual.norm(g)?)
}

/// Same with a caller-supplied `|g|_X'`.
pub fn pairing_check_with(space: &Space, f: &GridFunction, g: &GridFunction, dual_norm: f64) -> Result<Pairing> {
    f.grid().check_same(g.grid())?;
    let lhs = f.mul(g).abs().integral();
    Ok(Pairing::new(lhs, space.norm(f)? * dual_norm))
}
