//! n-dimensional complex FFTs built from per-axis rustfft passes.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::grid::TorusGrid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized in-place transform over every axis of `grid`.
pub(crate) fn fft_nd(grid: &TorusGrid, buf: &mut [Complex64], direction: FftDirection) {
    let sizes = grid.sizes();
    let total = buf.len();
    debug_assert_eq!(total, grid.len());
    PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        let mut stride = 1;
        for axis in (0..sizes.len()).rev() {
            let n = sizes[axis];
            let fft = planner.plan_fft(n, direction);
            if stride == 1 {
                fft.process(buf);
            } else {
                let mut line = vec![Complex64::new(0.0, 0.0); n];
                let block = n * stride;
                for outer in (0..total).step_by(block) {
                    for inner in 0..stride {
                        let base = outer + inner;
                        for (j, v) in line.iter_mut().enumerate() {
                            *v = buf[base + j * stride];
                        }
                        fft.process(&mut line);
                        for (j, v) in line.iter().enumerate() {
                            buf[base + j * stride] = *v;
                        }
                    }
                }
            }
            stride *= n;
        }
    });
}

/// Coefficients of real samples, `c(k) = N^{-n} Σ f_j e^{-ik·x_j}`, with
/// Hermitian symmetry imposed exactly.
pub(crate) fn forward_real(grid: &TorusGrid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(grid, &mut buf, FftDirection::Forward);
    let scale = 1.0 / grid.len() as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
    symmetrize(grid, &mut buf);
    buf
}

/// Real part of the trigonometric sum `Σ c(k) e^{ik·x_j}`.
pub(crate) fn inverse_real(grid: &TorusGrid, coeffs: &[Complex64]) -> Vec<f64> {
    inverse_complex(grid, coeffs).into_iter().map(|c| c.re).collect()
}

pub(crate) fn inverse_complex(grid: &TorusGrid, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    fft_nd(grid, &mut buf, FftDirection::Inverse);
    buf
}

/// Project onto Hermitian-symmetric coefficients: `c(k) <- (c(k) + conj c(-k))/2`.
pub(crate) fn symmetrize(grid: &TorusGrid, coeffs: &mut [Complex64]) {
    for i in 0..coeffs.len() {
        let p = grid.partner(i);
        if p < i {
            continue;
        }
        if p == i {
            coeffs[i].im = 0.0;
        } else {
            let avg = 0.5 * (coeffs[i] + coeffs[p].conj());
            coeffs[i] = avg;
            coeffs[p] = avg.conj();
        }
    }
}
