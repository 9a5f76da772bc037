use super::fft::fft_nd;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BesselDirection {
    /// `(1 - Laplacian)^{s/2}`
    Forward,
    /// `(1 - Laplacian)^{-s/2}`
    Inverse,
}

/// Applies the Fourier multiplier `(1 + |xi|^2)^{+-s/2}` with the box treated as a
/// period cell, `xi = 2 pi k / side`.
pub fn bessel_potential(f: &GridFunction, s: f64, direction: BesselDirection) -> Result<GridFunction> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("Bessel order must be >= 0, got {s}")));
    }
    let g = *f.grid();
    if s == 0.0 {
        return Ok(f.clone());
    }
    let shape = g.shape();
    let mut data: Vec<Complex<f64>> = f.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_nd(&mut data, shape, false);
    let exponent = match direction {
        BesselDirection::Forward => s / 2.0,
        BesselDirection::Inverse => -s / 2.0,
    };
    let freq = |k: usize, n: usize, side: f64| {
        let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        2.0 * PI * signed / side
    };
    for j in 0..shape[1] {
        let xi1 = if g.dim() == 2 { freq(j, shape[1], g.side(1)) } else { 0.0 };
        for i in 0..shape[0] {
            let xi0 = freq(i, shape[0], g.side(0));
            let m = (1.0 + xi0 * xi0 + xi1 * xi1).powf(exponent);
            data[i + shape[0] * j] *= m;
        }
    }
    fft_nd(&mut data, shape, true);
    let norm = g.len() as f64;
    GridFunction::new(g, data.iter().map(|c| c.re / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn order_zero_is_identity() {
        let g = Grid::line(0.0, 1.0, 4).unwrap();
        let f = GridFunction::from_fn(g, |x| x[0].powi(3)).unwrap();
        assert_eq!(bessel_potential(&f, 0.0, BesselDirection::Forward).unwrap(), f);
    }

    #[test]
    fn constants_are_fixed() {
        let g = Grid::square(-1.0, 1.0, 3).unwrap();
        let f = GridFunction::constant(g, 2.5);
        let out = bessel_potential(&f, 1.7, BesselDirection::Forward).unwrap();
        assert!(out.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn sine_is_an_eigenfunction() {
        let g = Grid::line(0.0, 1.0, 6).unwrap();
        let f = GridFunction::from_fn(g, |x| (2.0 * PI * x[0]).sin()).unwrap();
        let out = bessel_potential(&f, 1.0, BesselDirection::Forward).unwrap();
        let factor = (1.0 + 4.0 * PI * PI).sqrt();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - factor * b).abs() < 1e-11);
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let g = Grid::square(0.0, 1.0, 4).unwrap();
        let f = GridFunction::from_fn(g, |x| (x[0] * 7.0).sin() + x[1]).unwrap();
        let fw = bessel_potential(&f, 1.3, BesselDirection::Forward).unwrap();
        let back = bessel_potential(&fw, 1.3, BesselDirection::Inverse).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
