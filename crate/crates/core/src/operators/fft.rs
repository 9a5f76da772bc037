use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// In-place n-dimensional FFT (n = 1 or 2) of a buffer stored first axis fastest.
/// The inverse is unnormalized.
pub(crate) fn fft_nd(data: &mut [Complex<f64>], shape: [usize; 2], inverse: bool) {
    let mut planner = FftPlanner::new();
    let [n0, n1] = shape;
    let row = if inverse { planner.plan_fft_inverse(n0) } else { planner.plan_fft_forward(n0) };
    row.process(data);
    if n1 > 1 {
        let col = if inverse { planner.plan_fft_inverse(n1) } else { planner.plan_fft_forward(n1) };
        let mut buf = vec![Complex::default(); n1];
        for i in 0..n0 {
            for (j, b) in buf.iter_mut().enumerate() {
                *b = data[i + n0 * j];
            }
            col.process(&mut buf);
            for (j, b) in buf.iter().enumerate() {
                data[i + n0 * j] = *b;
            }
        }
    }
}
