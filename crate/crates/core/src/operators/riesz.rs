use super::fft::fft_nd;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use rustfft::num_complex::Complex;

/// Truncated Riesz transform along `axis`:
/// `sum over cells y with |x - y| > eps of (x_j - y_j) / |x - y|^{n+1} f(y) h^n`.
///
/// In one dimension this is the unnormalized Hilbert transform `int f(y) / (x - y) dy`.
/// No periodic wraparound: the sum is a linear convolution.
pub fn riesz(f: &GridFunction, axis: usize, eps: f64) -> Result<GridFunction> {
    let g = *f.grid();
    let h = g.h();
    if axis >= g.dim() {
        return Err(Error::InvalidParameter(format!("axis {axis} out of range for n = {}", g.dim())));
    }
    if !(eps >= h * (1.0 - 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "truncation radius {eps} is below the cell side {h}"
        )));
    }
    if f.is_zero() {
        return Ok(GridFunction::zeros(g));
    }
    let [n0, n1] = g.shape();
    let n = g.dim();
    let m0 = (2 * n0).next_power_of_two();
    let m1 = if n == 2 { (2 * n1).next_power_of_two() } else { 1 };
    let vol = g.cell_volume();
    let mut kernel = vec![Complex::default(); m0 * m1];
    let wrap = |d: isize, m: usize| if d >= 0 { d as usize } else { (m as isize + d) as usize };
    let span1 = if n == 2 { n1 as isize - 1 } else { 0 };
    for d1 in -span1..=span1 {
        for d0 in -(n0 as isize - 1)..=(n0 as isize - 1) {
            let x = [d0 as f64 * h, d1 as f64 * h];
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r <= eps {
                continue;
            }
            let k = x[axis] / r.powi(n as i32 + 1) * vol;
            kernel[wrap(d0, m0) + m0 * wrap(d1, m1)] = Complex::new(k, 0.0);
        }
    }
    let mut data = vec![Complex::default(); m0 * m1];
    for j in 0..n1 {
        for i in 0..n0 {
            data[i + m0 * j] = Complex::new(f.values()[g.index(i, j)], 0.0);
        }
    }
    fft_nd(&mut kernel, [m0, m1], false);
    fft_nd(&mut data, [m0, m1], false);
    for (d, k) in data.iter_mut().zip(&kernel) {
        *d *= k;
    }
    fft_nd(&mut data, [m0, m1], true);
    let norm = (m0 * m1) as f64;
    let mut out = vec![0.0; g.len()];
    for j in 0..n1 {
        for i in 0..n0 {
            out[g.index(i, j)] = data[i + m0 * j].re / norm;
        }
    }
    GridFunction::new(g, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn direct(f: &GridFunction, axis: usize, eps: f64) -> Vec<f64> {
        let g = f.grid();
        let n = g.dim() as i32;
        (0..g.len())
            .map(|i| {
                let x = g.center(i);
                (0..g.len())
                    .map(|k| {
                        let y = g.center(k);
                        let d = [x[0] - y[0], x[1] - y[1]];
                        let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
                        if r <= eps { 0.0 } else { d[axis] / r.powi(n + 1) * f.values()[k] * g.cell_volume() }
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        let g = Grid::square(0.0, 1.0, 3).unwrap();
        let f = GridFunction::from_fn(g, |x| (x[0] * 5.0).sin() * x[1]).unwrap();
        for axis in 0..2 {
            let fast = riesz(&f, axis, 2.0 * g.h()).unwrap();
            for (a, b) in fast.values().iter().zip(direct(&f, axis, 2.0 * g.h())) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn truncation_below_cell_is_rejected() {
        let g = Grid::line(0.0, 1.0, 3).unwrap();
        let f = GridFunction::constant(g, 1.0);
        assert!(riesz(&f, 0, 0.01).is_err());
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = Grid::line(-1.0, 1.0, 4).unwrap();
        let out = riesz(&GridFunction::zeros(g), 0, g.h()).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn even_function_vanishes_at_its_center() {
        let g = Grid::line(-2.0, 2.0, 6).unwrap();
        let f = GridFunction::from_fn(g, |x| (-x[0] * x[0]).exp()).unwrap();
        let out = riesz(&f, 0, g.h()).unwrap();
        // the two cells adjacent to 0 are mirror images
        let i = g.shape()[0] / 2;
        assert!((out.values()[i] + out.values()[i - 1]).abs() < 1e-12);
    }
}
