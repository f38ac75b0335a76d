//! Fourier symbols of the singular operators, as functions of the wavevector.

use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Zero-mode value of `Λ^{-1}`: the log-sine kernel integrates constants to
/// `2 log 2`.
pub const LAMBDA_INV_ZERO_MODE: f64 = 2.0 * std::f64::consts::LN_2;

fn norm(k: &[i64]) -> f64 {
    (k.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt()
}

/// `-i sgn(k₁)` with `sgn(0) = 0`.
pub fn hilbert(k: &[i64]) -> Complex64 {
    -I * k[0].signum() as f64
}

/// `i k_axis`.
pub fn derivative(axis: usize) -> impl Fn(&[i64]) -> Complex64 {
    move |k| I * k[axis] as f64
}

/// `|k|^γ`; the zero mode is kept only for `γ = 0`.
pub fn lambda_pow(gamma: f64) -> impl Fn(&[i64]) -> f64 {
    move |k| {
        if gamma == 0.0 {
            1.0
        } else if k.iter().all(|&x| x == 0) {
            0.0
        } else {
            norm(k).powf(gamma)
        }
    }
}

/// `1/|k|`, with `2 log 2` at the zero mode.
pub fn lambda_inv(k: &[i64]) -> f64 {
    if k.iter().all(|&x| x == 0) {
        LAMBDA_INV_ZERO_MODE
    } else {
        1.0 / norm(k)
    }
}

/// `-i k_j / |k|`, zero at `k = 0`.
pub fn riesz(j: usize) -> impl Fn(&[i64]) -> Complex64 {
    move |k| {
        let r = norm(k);
        if r == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            -I * (k[j] as f64 / r)
        }
    }
}

/// `-|k|²`.
pub fn laplacian(k: &[i64]) -> f64 {
    -k.iter().map(|&x| (x * x) as f64).sum::<f64>()
}
