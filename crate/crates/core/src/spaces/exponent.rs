use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::{Grid, GridFunction};
use serde::{Deserialize, Serialize};

/// A constant or an expression in `x1`, `x2`, `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentSpec {
    Const(f64),
    Expr(String),
}

impl From<f64> for ExponentSpec {
    fn from(v: f64) -> Self {
        ExponentSpec::Const(v)
    }
}

impl ExponentSpec {
    pub fn as_const(&self) -> Option<f64> {
        match self {
            ExponentSpec::Const(v) => Some(*v),
            ExponentSpec::Expr(s) => {
                let e = Expr::parse(s).ok()?;
                if e.is_constant() {
                    Some(e.eval_point(&[0.0, 0.0]))
                } else {
                    None
                }
            }
        }
    }
}

/// Empirical log-Holder constants: `|p(x) - p(y)| <= c_local / log(1/|x-y|)` for
/// `|x-y| <= 1/2` and `|p(x) - p_inf| <= c_decay / log(e + |x|)` on sampled pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogHolder {
    pub c_local: f64,
    pub c_decay: f64,
    pub p_inf: f64,
}

/// A variable exponent sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFunction {
    values: GridFunction,
    min: f64,
    max: f64,
}

impl ExponentFunction {
    /// Samples the exponent and checks `0 < min <= max < inf`.
    pub fn build(spec: &ExponentSpec, grid: &Grid) -> Result<Self> {
        let values = match spec {
            ExponentSpec::Const(v) => GridFunction::constant(*grid, *v),
            ExponentSpec::Expr(s) => GridFunction::sample(&Expr::parse(s)?, *grid)?,
        };
        let min = values.min_value();
        let max = values.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::from_values(values, min, max)
    }

    /// Like [`Self::build`] but allows any real values (for `alpha(x)`).
    pub fn build_signed(spec: &ExponentSpec, grid: &Grid) -> Result<Self> {
        let values = match spec {
            ExponentSpec::Const(v) => GridFunction::constant(*grid, *v),
            ExponentSpec::Expr(s) => GridFunction::sample(&Expr::parse(s)?, *grid)?,
        };
        let min = values.min_value();
        let max = values.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(ExponentFunction { values, min, max })
    }

    fn from_values(values: GridFunction, min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exponent range [{min}, {max}] must satisfy 0 < p- <= p+ < inf"
            )));
        }
        Ok(ExponentFunction { values, min, max })
    }

    pub fn values(&self) -> &[f64] {
        self.values.values()
    }

    pub fn function(&self) -> &GridFunction {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn constant(&self) -> Option<f64> {
        (self.min == self.max).then_some(self.min)
    }

    /// Conjugate exponent `p/(p-1)`; requires `p- > 1`.
    pub fn conjugate(&self) -> Result<Self> {
        if self.min <= 1.0 {
            return Err(Error::InvalidParameter("conjugate exponent needs p- > 1".into()));
        }
        let v = self.values.map(|p| p / (p - 1.0));
        Ok(ExponentFunction { min: self.max / (self.max - 1.0), max: self.min / (self.min - 1.0), values: v })
    }

    /// Pointwise ratio `a / b` of two exponents on the same grid.
    pub fn ratio(a: &Self, b: &Self) -> Result<Self> {
        a.values.grid().check_same(b.values.grid())?;
        let values = a.values.zip_with(&b.values, |x, y| x / y);
        let min = values.min_value();
        let max = values.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::from_values(values, min, max)
    }

    /// Estimates the log-Holder constants on pairs at dyadic offsets along each axis.
    pub fn log_holder(&self) -> LogHolder {
        let g = *self.values.grid();
        let v = self.values.values();
        let mut c_local: f64 = 0.0;
        let shape = g.shape();
        for axis in 0..g.dim() {
            let mut step = 1usize;
            while (step as f64) * g.h() <= 0.5 && step < shape[axis] {
                let d = step as f64 * g.h();
                let scale = (1.0 / d).ln();
                for i in 0..g.len() {
                    let c = g.coords(i);
                    if c[axis] + step >= shape[axis] {
                        continue;
                    }
                    let mut o = c;
                    o[axis] += step;
                    let j = g.index(o[0], o[1]);
                    c_local = c_local.max((v[i] - v[j]).abs() * scale);
                }
                step *= 2;
            }
        }
        let radius = |i: usize| {
            let x = g.center(i);
            (x[0] * x[0] + x[1] * x[1]).sqrt()
        };
        let far = (0..g.len()).map(radius).fold(0.0, f64::max);
        let outer: Vec<f64> = (0..g.len()).filter(|&i| radius(i) >= far - g.h()).map(|i| v[i]).collect();
        let p_inf = outer.iter().sum::<f64>() / outer.len() as f64;
        let c_decay = (0..g.len())
            .map(|i| (v[i] - p_inf).abs() * (std::f64::consts::E + radius(i)).ln())
            .fold(0.0, f64::max);
        LogHolder { c_local, c_decay, p_inf }
    }
}
