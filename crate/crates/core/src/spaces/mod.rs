//! Ball Banach function-space norms behind one evaluator interface, Kothe
//! duals where they are explicit, and the axiom checks.

mod axioms;
mod dual;
mod exponent;
mod luxemburg;
mod norms;
mod probes;
mod young;

pub use axioms::{axioms_check, axioms_check_with, standard_battery, AxiomBattery};
pub use dual::{kothe_dual, pairing_check, Pairing};
pub use exponent::{ExponentFunction, ExponentSpec, LogHolder};
pub use luxemburg::{luxemburg, DEFAULT_TOL};
pub use norms::{
    bbm_norm, herz_norm, lorentz_norm, mixed_sequence_norm, morrey_norm, orlicz_norm, variable_herz_norm,
    variable_lebesgue_norm, weighted_lebesgue_norm, Annuli, Block, SequenceTerm,
};
pub use probes::{absolute_continuity_probe, characteristic_ratio_profile, RatioProfile, RatioRow};
pub use young::{YoungFunction, YoungReport, YoungSpec};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::numeric::ext_f64;
use crate::weights::{Weight, WeightSpec};
use norms::VarHerzData;
use serde::{Deserialize, Serialize};

fn yes() -> bool {
    true
}

/// Tagged description of one space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    WeightedLebesgue {
        p: f64,
        #[serde(default)]
        weight: WeightSpec,
    },
    Lorentz {
        p: f64,
        #[serde(with = "ext_f64")]
        q: f64,
    },
    Herz {
        alpha: f64,
        p: f64,
        #[serde(with = "ext_f64")]
        q: f64,
        #[serde(default = "yes")]
        homogeneous: bool,
    },
    VarLebesgue {
        p: ExponentSpec,
        #[serde(default)]
        weight: WeightSpec,
    },
    VarHerz {
        alpha: ExponentSpec,
        p: ExponentSpec,
        q: ExponentSpec,
        #[serde(default)]
        v: WeightSpec,
        #[serde(default)]
        w: WeightSpec,
        #[serde(default = "yes")]
        homogeneous: bool,
    },
    Orlicz {
        phi: YoungSpec,
    },
    Morrey {
        r0: f64,
        r: f64,
    },
    Bbm {
        p: f64,
        q: f64,
        #[serde(with = "ext_f64")]
        r: f64,
        #[serde(with = "ext_f64")]
        tau: f64,
    },
    Convexified {
        base: Box<SpaceSpec>,
        power: f64,
    },
}

/// Registered tags with their parameter schemas, in stable order.
pub const SPACE_TAGS: [(&str, &str); 9] = [
    ("weighted_lebesgue", "p >= 1, weight"),
    ("lorentz", "1 <= p < inf, 1 <= q <= inf"),
    ("herz", "alpha, 1 <= p < inf, 1 <= q <= inf, homogeneous = true"),
    ("var_lebesgue", "p(x) with 0 < p- <= p+ < inf, weight"),
    ("var_herz", "alpha(x), p(x), q(x), v, w, homogeneous = true"),
    ("orlicz", "phi = { kind = power | power_log | expr }"),
    ("morrey", "1 <= r <= r0 < inf"),
    ("bbm", "1 <= q <= p < inf, 1 <= r <= inf, 1 <= tau <= inf"),
    ("convexified", "base space, power > 0"),
];

impl SpaceSpec {
    pub fn lebesgue(p: f64) -> Self {
        SpaceSpec::WeightedLebesgue { p, weight: WeightSpec::one() }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            SpaceSpec::WeightedLebesgue { .. } => "weighted_lebesgue",
            SpaceSpec::Lorentz { .. } => "lorentz",
            SpaceSpec::Herz { .. } => "herz",
            SpaceSpec::VarLebesgue { .. } => "var_lebesgue",
            SpaceSpec::VarHerz { .. } => "var_herz",
            SpaceSpec::Orlicz { .. } => "orlicz",
            SpaceSpec::Morrey { .. } => "morrey",
            SpaceSpec::Bbm { .. } => "bbm",
            SpaceSpec::Convexified { .. } => "convexified",
        }
    }

    /// Checks parameter ranges that do not depend on a grid.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(format!("{}: {m}", self.tag())));
        let exp_ok = |v: f64| v >= 1.0;
        match self {
            SpaceSpec::WeightedLebesgue { p, .. } if !(exp_ok(*p) && p.is_finite()) => bad(format!("p = {p}")),
            SpaceSpec::Lorentz { p, q } if !(exp_ok(*p) && p.is_finite() && exp_ok(*q)) => {
                bad(format!("p = {p}, q = {q}"))
            }
            SpaceSpec::Herz { alpha, p, q, .. }
                if !(alpha.is_finite() && exp_ok(*p) && p.is_finite() && exp_ok(*q)) =>
            {
                bad(format!("alpha = {alpha}, p = {p}, q = {q}"))
            }
            SpaceSpec::Morrey { r0, r } if !(exp_ok(*r) && r <= r0 && r0.is_finite()) => {
                bad(format!("need 1 <= r <= r0 < inf, got r = {r}, r0 = {r0}"))
            }
            SpaceSpec::Bbm { p, q, r, tau }
                if !(exp_ok(*q) && q <= p && p.is_finite() && exp_ok(*r) && exp_ok(*tau)) =>
            {
                bad(format!("need 1 <= q <= p < inf and r, tau >= 1, got p = {p}, q = {q}, r = {r}, tau = {tau}"))
            }
            SpaceSpec::Convexified { base, power } => {
                if !(*power > 0.0 && power.is_finite()) {
                    return bad(format!("power = {power}"));
                }
                base.validate()
            }
            SpaceSpec::Orlicz { phi } => YoungFunction::new(phi.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// False for the spaces known to be non-separable.
    pub fn is_separable(&self) -> bool {
        match self {
            SpaceSpec::Lorentz { q, .. } | SpaceSpec::Herz { q, .. } => q.is_finite(),
            SpaceSpec::Morrey { r0, r } => r == r0,
            SpaceSpec::Bbm { r, tau, .. } => r.is_finite() && tau.is_finite(),
            SpaceSpec::Convexified { base, .. } => base.is_separable(),
            _ => true,
        }
    }

    pub fn build(&self, grid: &Grid) -> Result<Space> {
        Space::build(self, grid)
    }
}

#[derive(Clone, Debug)]
enum Built {
    WeightedLebesgue { p: f64, w: Option<Weight> },
    Lorentz { p: f64, q: f64 },
    Herz { alpha: f64, p: f64, q: f64, annuli: Annuli },
    VarLebesgue { p: ExponentFunction, w: Option<Weight> },
    VarHerz { p: ExponentFunction, q: ExponentFunction, data: VarHerzData },
    Orlicz { phi: YoungFunction },
    Morrey { r0: f64, r: f64 },
    Bbm { p: f64, q: f64, r: f64, tau: f64 },
    Convexified { base: Box<Space>, power: f64 },
}

/// A space materialized on a grid: weights and exponents sampled, annuli built.
#[derive(Clone, Debug)]
pub struct Space {
    spec: SpaceSpec,
    grid: Grid,
    tol: f64,
    built: Built,
}

fn optional_weight(spec: &WeightSpec, grid: &Grid) -> Result<Option<Weight>> {
    if spec.is_unit() {
        Ok(None)
    } else {
        spec.build(grid).map(Some)
    }
}

impl Space {
    pub fn build(spec: &SpaceSpec, grid: &Grid) -> Result<Self> {
        spec.validate()?;
        let built = match spec {
            SpaceSpec::WeightedLebesgue { p, weight } => {
                Built::WeightedLebesgue { p: *p, w: optional_weight(weight, grid)? }
            }
            SpaceSpec::Lorentz { p, q } => Built::Lorentz { p: *p, q: *q },
            SpaceSpec::Herz { alpha, p, q, homogeneous } => {
                Built::Herz { alpha: *alpha, p: *p, q: *q, annuli: Annuli::new(grid, *homogeneous) }
            }
            SpaceSpec::VarLebesgue { p, weight } => Built::VarLebesgue {
                p: ExponentFunction::build(p, grid)?,
                w: optional_weight(weight, grid)?,
            },
            SpaceSpec::VarHerz { alpha, p, q, v, w, homogeneous } => {
                let alpha = ExponentFunction::build_signed(alpha, grid)?;
                let v = optional_weight(v, grid)?;
                let w = optional_weight(w, grid)?;
                Built::VarHerz {
                    p: ExponentFunction::build(p, grid)?,
                    q: ExponentFunction::build(q, grid)?,
                    data: VarHerzData::new(grid, &alpha, v.as_ref(), w.as_ref(), *homogeneous)?,
                }
            }
            SpaceSpec::Orlicz { phi } => Built::Orlicz { phi: YoungFunction::new(phi.clone())? },
            SpaceSpec::Morrey { r0, r } => Built::Morrey { r0: *r0, r: *r },
            SpaceSpec::Bbm { p, q, r, tau } => Built::Bbm { p: *p, q: *q, r: *r, tau: *tau },
            SpaceSpec::Convexified { base, power } => {
                Built::Convexified { base: Box::new(Space::build(base, grid)?), power: *power }
            }
        };
        Ok(Space { spec: spec.clone(), grid: *grid, tol: DEFAULT_TOL, built })
    }

    /// Relative bracket width for Luxemburg solves.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        if let Built::Convexified { base, .. } = &mut self.built {
            **base = (**base).clone().with_tol(tol);
        }
        self
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `rho(|f|)`; may be `inf`.
    pub fn norm(&self, f: &GridFunction) -> Result<f64> {
        self.grid.check_same(f.grid())?;
        let tol = self.tol;
        match &self.built {
            Built::WeightedLebesgue { p, w } => weighted_lebesgue_norm(*p, w.as_ref(), f),
            Built::Lorentz { p, q } => Ok(lorentz_norm(*p, *q, f)),
            Built::Herz { alpha, p, q, annuli } => Ok(norms::herz_with(annuli, *alpha, *p, *q, f)),
            Built::VarLebesgue { p, w } => variable_lebesgue_norm(p, w.as_ref(), f, tol),
            Built::VarHerz { p, q, data } => data.norm(f, p, q, tol),
            Built::Orlicz { phi } => orlicz_norm(phi, f, tol),
            Built::Morrey { r0, r } => Ok(morrey_norm(*r0, *r, f)),
            Built::Bbm { p, q, r, tau } => Ok(bbm_norm(*p, *q, *r, *tau, f)),
            Built::Convexified { base, power } => {
                Ok(base.norm(&f.map(|v| v.abs().powf(1.0 / power)))?.powf(*power))
            }
        }
    }
}

/// Builds `X` on the grid of `f` and evaluates its norm.
pub fn norm(spec: &SpaceSpec, f: &GridFunction) -> Result<f64> {
    Space::build(spec, f.grid())?.norm(f)
}
