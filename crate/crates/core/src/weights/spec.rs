use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::{Grid, GridFunction};
use serde::{Deserialize, Serialize};

/// Parametric description of a weight, materialized on a grid by [`WeightSpec::build`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { value: f64 },
    /// `|x|^alpha`
    Power { alpha: f64 },
    /// `max(1, |x|)^alpha`
    CappedPower { alpha: f64 },
    /// Radial step function: `values[i]` on `breaks[i-1] <= |x| < breaks[i]`.
    Piecewise { breaks: Vec<f64>, values: Vec<f64> },
    /// An expression in `x1`, `x2`, `r`.
    Expr { expr: String },
    /// One value per cell, first axis fastest.
    Values { values: Vec<f64> },
    /// `base^exponent`
    Powered { base: Box<WeightSpec>, exponent: f64 },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Constant { value: 1.0 }
    }
}

impl WeightSpec {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, WeightSpec::Constant { value } if *value == 1.0)
    }

    pub fn powered(self, exponent: f64) -> Self {
        match self {
            WeightSpec::Constant { value } => WeightSpec::Constant { value: value.powf(exponent) },
            WeightSpec::Power { alpha } => WeightSpec::Power { alpha: alpha * exponent },
            WeightSpec::Powered { base, exponent: e } => WeightSpec::Powered { base, exponent: e * exponent },
            other => WeightSpec::Powered { base: Box::new(other), exponent },
        }
    }

    pub fn build(&self, grid: &Grid) -> Result<Weight> {
        let g = *grid;
        let f = match self {
            WeightSpec::Constant { value } => GridFunction::constant(g, *value),
            WeightSpec::Power { alpha } => GridFunction::from_fn(g, |x| norm(x).powf(*alpha))?,
            WeightSpec::CappedPower { alpha } => GridFunction::from_fn(g, |x| norm(x).max(1.0).powf(*alpha))?,
            WeightSpec::Piecewise { breaks, values } => {
                if values.len() != breaks.len() + 1 || breaks.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidParameter(
                        "piecewise weight needs increasing breaks and one more value than breaks".into(),
                    ));
                }
                GridFunction::from_fn(g, |x| values[breaks.partition_point(|&b| b <= norm(x))])?
            }
            WeightSpec::Expr { expr } => GridFunction::sample(&Expr::parse(expr)?, g)?,
            WeightSpec::Values { values } => GridFunction::new(g, values.clone())?,
            WeightSpec::Powered { base, exponent } => base.build(grid)?.into_function().powf(*exponent),
        };
        Weight::new(f)
    }
}

fn norm(x: [f64; 2]) -> f64 {
    (x[0] * x[0] + x[1] * x[1]).sqrt()
}

/// A strictly positive, finite grid function.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight(GridFunction);

impl Weight {
    pub fn new(f: GridFunction) -> Result<Self> {
        if let Some((cell, &value)) =
            f.values().iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveWeight { cell, value });
        }
        Ok(Weight(f))
    }

    pub fn one(grid: Grid) -> Self {
        Weight(GridFunction::constant(grid, 1.0))
    }

    pub fn function(&self) -> &GridFunction {
        &self.0
    }

    pub fn into_function(self) -> GridFunction {
        self.0
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }

    pub fn powf(&self, e: f64) -> Result<Weight> {
        Weight::new(self.0.powf(e))
    }
}

impl AsRef<GridFunction> for Weight {
    fn as_ref(&self) -> &GridFunction {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_weight_avoids_origin() {
        let g = Grid::line(-1.0, 1.0, 6).unwrap();
        let w = WeightSpec::Power { alpha: -1.5 }.build(&g).unwrap();
        assert!(w.values().iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn capped_and_piecewise() {
        let g = Grid::line(-4.0, 4.0, 1).unwrap();
        let w = WeightSpec::CappedPower { alpha: 2.0 }.build(&g).unwrap();
        assert_eq!(w.values()[0], 3.75 * 3.75);
        assert_eq!(w.values()[8], 1.0);
        let p = WeightSpec::Piecewise { breaks: vec![1.0], values: vec![2.0, 3.0] }.build(&g).unwrap();
        assert_eq!(p.values()[8], 2.0);
        assert_eq!(p.values()[0], 3.0);
    }

    #[test]
    fn non_positive_weight_is_rejected() {
        let g = Grid::line(-1.0, 1.0, 2).unwrap();
        let err = WeightSpec::Expr { expr: "x".into() }.build(&g).unwrap_err();
        assert!(matches!(err, Error::NonPositiveWeight { cell: 0, .. }));
    }

    #[test]
    fn serde_shape() {
        let s: WeightSpec = serde_json::from_str(r#"{"kind":"capped_power","alpha":0.3}"#).unwrap();
        assert_eq!(s, WeightSpec::CappedPower { alpha: 0.3 });
        assert_eq!(WeightSpec::Power { alpha: 1.0 }.powered(-0.5), WeightSpec::Power { alpha: -0.5 });
    }
}
