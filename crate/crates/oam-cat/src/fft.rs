//! Centered 2-D FFT helpers.
//!
//! `fft2_centered` computes the DFT with both spatial and frequency indices
//! referenced to the grid center: for even `n` this is exactly
//! `fftshift(FFT(ifftshift(x)))`, with frequency samples `(m - n/2) / (n d)`.
//! Forward is unnormalized; the inverse divides by the sample count so the
//! pair round-trips exactly.

use ndarray::Array2;
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::FftPlanner;
use std::sync::Mutex;

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn transform_rows(a: &mut Array2<Complex64>, inverse: bool) {
    let n = a.ncols();
    let plan = {
        let mut planner = PLANNER.lock().unwrap();
        if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        }
    };
    let slice = a.as_slice_mut().expect("standard layout");
    for row in slice.chunks_exact_mut(n) {
        plan.process(row);
    }
}

/// Swap quadrants; for even dimensions this is both fftshift and ifftshift.
fn shift2(a: &Array2<Complex64>) -> Array2<Complex64> {
    let (ny, nx) = a.dim();
    Array2::from_shape_fn((ny, nx), |(j, i)| a[[(j + ny / 2) % ny, (i + nx / 2) % nx]])
}

fn fft2_impl(a: &Array2<Complex64>, inverse: bool) -> Array2<Complex64> {
    let mut b = shift2(a);
    transform_rows(&mut b, inverse);
    let mut bt = b.t().as_standard_layout().to_owned();
    transform_rows(&mut bt, inverse);
    let c = bt.t().as_standard_layout().to_owned();
    let mut out = shift2(&c);
    if inverse {
        let scale = 1.0 / (a.len() as f64);
        out.mapv_inplace(|v| v * scale);
    }
    out
}

/// Centered forward DFT (unnormalized).
pub(crate) fn fft2_centered(a: &Array2<Complex64>) -> Array2<Complex64> {
    fft2_impl(a, false)
}

/// Centered inverse DFT, normalized by 1/(nx ny).
pub(crate) fn ifft2_centered(a: &Array2<Complex64>) -> Array2<Complex64> {
    fft2_impl(a, true)
}

/// Centered frequency sample for index `m` of `n` samples at pitch `d`,
/// in cycles per meter.
pub(crate) fn freq_centered(m: usize, n: usize, d: f64) -> f64 {
    (m as f64 - (n / 2) as f64) / (n as f64 * d)
}

/// FFT-ordered frequency sample (DC at index 0), in cycles per meter.
pub(crate) fn freq_fft_order(m: usize, n: usize, d: f64) -> f64 {
    let m = m as isize;
    let n = n as isize;
    let k = if m <= n / 2 { m } else { m - n };
    k as f64 / (n as f64 * d)
}
