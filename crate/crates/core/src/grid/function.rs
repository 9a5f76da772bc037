use super::{BallIntegrator, Grid, Region};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numeric::pairwise_sum;

/// A cell-constant function: one finite value per grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::IncompatibleGrid(format!(
                "{} values for {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { cell, value });
        }
        Ok(GridFunction { grid, values })
    }

    /// Internal constructor for values known to be finite.
    pub(crate) fn from_vec(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFunction { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        GridFunction { grid, values: vec![c; grid.len()] }
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.center(i))).collect();
        Self::new(grid, values)
    }

    pub fn sample(expr: &Expr, grid: Grid) -> Result<Self> {
        Self::from_fn(grid, |x| expr.eval_point(&x))
    }

    /// Indicator of the cells whose centers satisfy `pred`.
    pub fn indicator(grid: Grid, pred: impl Fn([f64; 2]) -> bool) -> Self {
        let values = (0..grid.len()).map(|i| if pred(grid.center(i)) { 1.0 } else { 0.0 }).collect();
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction::from_vec(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Combines two functions on the same grid.
    ///
    /// # Panics
    /// If the grids differ.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "grid functions live on different grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        GridFunction::from_vec(self.grid, values)
    }

    /// Fails with `NonFinite` if any value overflowed.
    pub fn checked(self) -> Result<Self> {
        Self::new(self.grid, self.values)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn powf(&self, p: f64) -> Self {
        self.map(|v| v.powf(p))
    }

    pub fn add(&self, other: &GridFunction) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFunction) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_with(&self, other: &GridFunction) -> Self {
        self.zip_with(other, f64::max)
    }

    pub fn restrict(&self, region: &Region) -> Self {
        let mut values = vec![0.0; self.len()];
        for (i, frac) in self.grid.region_weights(region) {
            values[i] = self.values[i] * frac;
        }
        GridFunction::from_vec(self.grid, values)
    }

    /// Sum of `value * covered fraction * h^n` over the region.
    pub fn integrate(&self, region: &Region) -> f64 {
        let terms: Vec<f64> = match region {
            Region::All => return pairwise_sum(&self.values) * self.grid.cell_volume(),
            _ => self.grid.region_weights(region).iter().map(|&(i, f)| self.values[i] * f).collect(),
        };
        pairwise_sum(&terms) * self.grid.cell_volume()
    }

    pub fn integral(&self) -> f64 {
        self.integrate(&Region::All)
    }

    /// Plain (unweighted) L^p quadrature norm; `p = inf` gives the max of `|f|`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup();
        }
        let terms: Vec<f64> = self.values.iter().map(|v| v.abs().powf(p)).collect();
        (pairwise_sum(&terms) * self.grid.cell_volume()).powf(1.0 / p)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn integrator(&self) -> BallIntegrator {
        BallIntegrator::new(self.grid, &self.values)
    }

    pub fn rearrange(&self) -> RearrangementProfile {
        let mut abs: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        abs.sort_by(|a, b| b.total_cmp(a));
        let cell = self.grid.cell_volume();
        let mut steps: Vec<(f64, f64)> = Vec::new();
        let mut count = 0usize;
        for (k, v) in abs.iter().enumerate() {
            count += 1;
            if k + 1 == abs.len() || abs[k + 1] != *v {
                steps.push((*v, count as f64 * cell));
            }
        }
        RearrangementProfile { steps }
    }
}

/// Decreasing rearrangement `f*` of a cell-constant function: a step function
/// equal to `steps[i].0` on `(steps[i-1].1, steps[i].1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RearrangementProfile {
    steps: Vec<(f64, f64)>,
}

impl RearrangementProfile {
    /// Pairs (value, cumulative measure), values strictly decreasing.
    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn total_measure(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.1)
    }

    /// `f*(t)`; zero beyond the box measure.
    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.steps.partition_point(|s| s.1 < t);
        self.steps.get(i).map_or(0.0, |s| s.0)
    }

    /// `iter()` over (value, measure of the level set piece).
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let mut prev = 0.0;
        self.steps.iter().map(move |&(v, t)| {
            let start = prev;
            prev = t;
            (v, start, t)
        })
    }

    /// `int_0^|box| f*(t)^p dt`.
    pub fn power_integral(&self, p: f64) -> f64 {
        let terms: Vec<f64> = self.pieces().map(|(v, a, b)| v.powf(p) * (b - a)).collect();
        pairwise_sum(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(level: u32) -> Grid {
        Grid::line(0.0, 1.0, level).unwrap()
    }

    #[test]
    fn sample_constant_and_indicator() {
        let one = GridFunction::sample(&Expr::parse("1").unwrap(), unit(3)).unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));
        let half = GridFunction::sample(&Expr::parse("ind(x, 0, 0.5)").unwrap(), unit(3)).unwrap();
        assert_eq!(half.values(), &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn sample_square_matches_centers() {
        let g = unit(10);
        let f = GridFunction::sample(&Expr::parse("x^2").unwrap(), g).unwrap();
        for i in [0, 17, 1023] {
            let c = (i as f64 + 0.5) / 1024.0;
            assert_eq!(f.values()[i], c * c);
        }
    }

    #[test]
    fn non_finite_sample_is_an_error() {
        let err = GridFunction::sample(&Expr::parse("1/(x - 0.0625)").unwrap(), unit(3)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { cell: 0, .. }));
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(GridFunction::constant(unit(3), 1.0).integral(), 1.0);
        let half = GridFunction::indicator(unit(3), |x| x[0] < 0.5);
        assert_eq!(half.integrate(&Region::interval(0.0, 1.0)), 0.5);
        let x = GridFunction::from_fn(unit(10), |x| x[0]).unwrap();
        assert!((x.integral() - 0.5).abs() <= 2f64.powi(-11));
        let empty = Region::interval(5.0, 6.0);
        assert_eq!(x.integrate(&empty), 0.0);
    }

    #[test]
    fn rearrangement_examples() {
        let g = Grid::line(0.0, 1.0, 2).unwrap();
        let e = GridFunction::new(g, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e.rearrange().steps(), &[(1.0, 0.25), (0.0, 1.0)]);
        let f = GridFunction::new(g, vec![3.0, 1.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.rearrange().steps(), &[(3.0, 0.25), (2.0, 0.5), (1.0, 0.75), (0.0, 1.0)]);
        let p = f.rearrange();
        assert_eq!(p.value_at(0.1), 3.0);
        assert_eq!(p.value_at(0.25), 3.0);
        assert_eq!(p.value_at(0.3), 2.0);
        assert_eq!(p.value_at(2.0), 0.0);
    }
}
