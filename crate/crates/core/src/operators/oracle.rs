//! Operators evaluated from their singular-integral kernels.
//!
//! The input is expanded into its trigonometric interpolant by a direct
//! discrete Fourier sum (no FFT), the kernel integral of every mode is
//! computed by quadrature, and the result is summed back on the grid. None
//! of this touches the multiplier tables used by the solver.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use super::quadrature::{composite_gauss, singular_left_rule, Rule};
use crate::error::{Error, Result};
use crate::spectral::{SpectralField, TorusGrid};

/// Image truncation used when deriving normalizing constants in 1D.
pub const CONSTANT_IMAGES_1D: usize = 20_000;
/// Image truncation used when deriving normalizing constants in 2D.
pub const CONSTANT_IMAGES_2D: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOp {
    Hilbert,
    /// `Λ^γ` for `0 < γ < 2`; `γ = 0` is the identity.
    LambdaPow(f64),
    LambdaInv,
}

#[derive(Debug, Clone)]
pub struct OracleOutput {
    pub field: SpectralField,
    /// Normalizing constant applied to the kernel, 1 for Hilbert and `Λ^{-1}`.
    pub constant: f64,
    /// Largest share of a mode's kernel integral contributed by the
    /// remainder estimate beyond the image truncation.
    pub tail_share: f64,
}

const GAUSS_ORDER: usize = 16;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Real interpolant `a_0 + Σ a_m cos mx + b_m sin mx`, `m = 1..=N/2`.
fn interpolant_1d(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let half = n / 2;
    let mut a = vec![0.0; half + 1];
    let mut b = vec![0.0; half + 1];
    for m in 0..=half {
        let (mut sc, mut ss) = (0.0, 0.0);
        for (j, &f) in values.iter().enumerate() {
            let th = 2.0 * PI * ((m * j) % n) as f64 / n as f64;
            sc += f * th.cos();
            ss += f * th.sin();
        }
        let w = if m == 0 || m == half { 1.0 } else { 2.0 };
        a[m] = w * sc / n as f64;
        b[m] = if m == half { 0.0 } else { w * ss / n as f64 };
    }
    (a, b)
}

/// `Σ_{k=1}^{K} [(2kπ+z)^{-s} + (2kπ-z)^{-s}]` plus the midpoint-rule
/// integral of the same sum over `k > K`.
fn image_sum(z: f64, s: f64, images: usize) -> (f64, f64) {
    let mut w = 0.0;
    for k in (1..=images).rev() {
        let c = 2.0 * PI * k as f64;
        w += (c + z).powf(-s) + (c - z).powf(-s);
    }
    let c = 2.0 * PI * (images as f64 + 0.5);
    let tail = ((c + z).powf(1.0 - s) + (c - z).powf(1.0 - s)) / (2.0 * PI * (s - 1.0));
    (w, tail)
}

fn panels_for(m_max: usize) -> usize {
    (2 * m_max).max(4)
}

/// Unnormalized kernel integrals `∫_0^π 4 sin²(mz/2) K(z) dz` for
/// `m = 0..=m_max`, with `K(z) = z^{-1-γ} + images`. Also returns the
/// largest relative share of the remainder term.
fn lambda_mode_integrals_1d(gamma: f64, images: usize, m_max: usize) -> (Vec<f64>, f64) {
    let s = 1.0 + gamma;
    let panels = panels_for(m_max);
    let h = PI / panels as f64;
    let first = singular_left_rule(h, 1, GAUSS_ORDER);
    let rest = composite_gauss(h, PI, panels - 1, GAUSS_ORDER);
    let mut total = vec![0.0; m_max + 1];
    let mut tails = vec![0.0; m_max + 1];
    let mut accumulate = |z: f64, w: f64, near_zero: bool| {
        let (img, tail) = image_sum(z, s, images);
        for m in 1..=m_max {
            let mf = m as f64;
            let sq = 4.0 * (0.5 * mf * z).sin().powi(2);
            let direct = if near_zero {
                let sc = sinc(0.5 * mf * z);
                mf * mf * sc * sc * z.powf(1.0 - gamma)
            } else {
                sq * z.powf(-s)
            };
            total[m] += w * (direct + sq * (img + tail));
            tails[m] += w * sq * tail;
        }
    };
    for (&z, &w) in first.nodes.iter().zip(&first.weights) {
        accumulate(z, w, true);
    }
    for (&z, &w) in rest.nodes.iter().zip(&rest.weights) {
        accumulate(z, w, false);
    }
    let share = (1..=m_max).map(|m| (tails[m] / total[m]).abs()).fold(0.0, f64::max);
    (total, share)
}

/// `(1/π) ∫_0^π sin(mz) cot(z/2) dz`.
fn hilbert_mode_integrals(m_max: usize) -> Vec<f64> {
    let rule = composite_gauss(0.0, PI, panels_for(m_max), GAUSS_ORDER);
    (0..=m_max)
        .map(|m| rule.integrate(|z| (m as f64 * z).sin() / (0.5 * z).tan()) / PI)
        .collect()
}

/// `-(2/π) ∫_0^π log(sin(z/2)) cos(mz) dz`.
fn lambda_inv_mode_integrals(m_max: usize) -> Vec<f64> {
    let rule = singular_left_rule(PI, panels_for(m_max), GAUSS_ORDER);
    (0..=m_max)
        .map(|m| -2.0 / PI * rule.integrate(|z| (0.5 * z).sin().ln() * (m as f64 * z).cos()))
        .collect()
}

fn constant_cache() -> &'static Mutex<HashMap<(u64, usize), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::Parameter(format!(
            "kernel form of Λ^γ needs 0 < γ < 2, got {gamma}"
        )));
    }
    Ok(())
}

/// Normalizing constant `c_{γ,n}` of the `Λ^γ` kernel, obtained by
/// requiring the kernel to map the mode `cos x₁` to itself.
pub fn kernel_constant(gamma: f64, n_dim: usize) -> Result<f64> {
    check_gamma(gamma)?;
    let key = (gamma.to_bits(), n_dim);
    if let Some(&c) = constant_cache().lock().expect("cache lock").get(&key) {
        return Ok(c);
    }
    let c = match n_dim {
        1 => 1.0 / lambda_mode_integrals_1d(gamma, CONSTANT_IMAGES_1D, 1).0[1],
        2 => 1.0 / Polar2d::new(gamma, CONSTANT_IMAGES_2D, 1.0).mode_integral(1, 0),
        _ => {
            return Err(Error::Dimension(format!(
                "kernel constant implemented for 1 and 2 axes, got {n_dim}"
            )))
        }
    };
    constant_cache().lock().expect("cache lock").insert(key, c);
    Ok(c)
}

/// Evaluates `op` on `f` through its kernel with lattice images truncated at
/// `images` periods per axis.
pub fn kernel_oracle(op: OracleOp, f: &SpectralField, images: usize) -> Result<OracleOutput> {
    if images == 0 {
        return Err(Error::Parameter("image truncation must be at least 1".into()));
    }
    match f.grid().n_dim() {
        1 => oracle_1d(op, f, images),
        2 => match op {
            OracleOp::LambdaPow(g) => oracle_2d(g, f, images),
            _ => Err(Error::Dimension(format!("{op:?} oracle is one-dimensional"))),
        },
        n => Err(Error::Dimension(format!("no kernel oracle on {n} axes"))),
    }
}

fn oracle_1d(op: OracleOp, f: &SpectralField, images: usize) -> Result<OracleOutput> {
    let grid = f.grid();
    let n = grid.sizes()[0];
    let (a, b) = interpolant_1d(f.values());
    let m_max = n / 2;
    if let OracleOp::LambdaPow(g) = op {
        if g == 0.0 {
            return Ok(OracleOutput {
                field: f.clone(),
                constant: 1.0,
                tail_share: 0.0,
            });
        }
    }
    // (per-mode factor, constant, tail share, odd flag)
    let (factors, constant, tail_share, odd) = match op {
        OracleOp::Hilbert => (hilbert_mode_integrals(m_max), 1.0, 0.0, true),
        OracleOp::LambdaInv => (lambda_inv_mode_integrals(m_max), 1.0, 0.0, false),
        OracleOp::LambdaPow(g) => {
            check_gamma(g)?;
            let (ints, share) = lambda_mode_integrals_1d(g, images, m_max);
            let c = kernel_constant(g, 1)?;
            let mut factors: Vec<f64> = ints.iter().map(|v| c * v).collect();
            factors[0] = 0.0;
            (factors, c, share, false)
        }
    };
    let values = (0..n)
        .map(|j| {
            let mut acc = if odd { 0.0 } else { factors[0] * a[0] };
            for m in 1..=m_max {
                let th = 2.0 * PI * ((m * j) % n) as f64 / n as f64;
                let (s, c) = th.sin_cos();
                acc += factors[m] * if odd { a[m] * s - b[m] * c } else { a[m] * c + b[m] * s };
            }
            acc
        })
        .collect();
    Ok(OracleOutput {
        field: SpectralField::from_physical(grid, values)?,
        constant,
        tail_share,
    })
}

/// Polar evaluation of the 2D `Λ^γ` kernel on a single mode, with the
/// lattice images unfolded into the box of half-width `(2K+1)π`.
struct Polar2d {
    gamma: f64,
    half_width: f64,
    /// `G(jπ)` for `G(X) = ∫_0^X (1 - cos u) u^{-1-γ} du`.
    prefix: Vec<f64>,
    gauss: (Vec<f64>, Vec<f64>),
}

impl Polar2d {
    fn new(gamma: f64, images: usize, max_freq: f64) -> Self {
        let half_width = (2 * images + 1) as f64 * PI;
        let x_max = max_freq * half_width * 2f64.sqrt();
        let panels = (x_max / PI).ceil() as usize + 1;
        let integrand = |u: f64| {
            let sc = sinc(0.5 * u);
            0.5 * sc * sc * u.powf(1.0 - gamma)
        };
        let first = singular_left_rule(PI, 1, GAUSS_ORDER);
        let gauss = super::quadrature::gauss_legendre(GAUSS_ORDER);
        let mut prefix = Vec::with_capacity(panels + 1);
        prefix.push(0.0);
        prefix.push(first.integrate(integrand));
        for j in 1..panels {
            let lo = j as f64 * PI;
            let seg: f64 = gauss
                .0
                .iter()
                .zip(&gauss.1)
                .map(|(x, w)| 0.5 * PI * w * integrand(lo + 0.5 * PI * (x + 1.0)))
                .sum();
            prefix.push(prefix[j] + seg);
        }
        Polar2d {
            gamma,
            half_width,
            prefix,
            gauss,
        }
    }

    fn g(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let j = (x / PI).floor() as usize;
        assert!(j + 1 < self.prefix.len(), "G table too short");
        let lo = j as f64 * PI;
        let h = x - lo;
        if h == 0.0 {
            return self.prefix[j];
        }
        let gamma = self.gamma;
        let f = |u: f64| {
            let sc = sinc(0.5 * u);
            0.5 * sc * sc * u.powf(1.0 - gamma)
        };
        let part: f64 = if j == 0 {
            singular_left_rule(h, 1, GAUSS_ORDER).integrate(f)
        } else {
            self.gauss
                .0
                .iter()
                .zip(&self.gauss.1)
                .map(|(xi, w)| 0.5 * h * w * f(lo + 0.5 * h * (xi + 1.0)))
                .sum()
        };
        self.prefix[j] + part
    }

    /// `∫_0^{2π} [a^γ G(aρ) + ρ^{-γ}/γ] dφ` with `a = |m·e_φ|` and `ρ` the
    /// distance to the box boundary along `e_φ`.
    fn mode_integral(&self, m1: i64, m2: i64) -> f64 {
        if m1 == 0 && m2 == 0 {
            return 0.0;
        }
        let mut breaks: Vec<f64> = (0..=8).map(|j| j as f64 * PI / 4.0).collect();
        let perp = (m2 as f64).atan2(m1 as f64) + 0.5 * PI;
        for shift in [0.0, PI, 2.0 * PI, -PI] {
            let p = perp + shift;
            if p > 0.0 && p < 2.0 * PI {
                breaks.push(p);
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let freq = ((m1 * m1 + m2 * m2) as f64).sqrt();
        let panels = ((freq * self.half_width / 64.0).ceil() as usize).clamp(8, 4096);
        let mut rule = Rule::default();
        for w in breaks.windows(2) {
            rule.extend(composite_gauss(w[0], w[1], panels, GAUSS_ORDER));
        }
        let gamma = self.gamma;
        rule.integrate(|phi| {
            let (s, c) = phi.sin_cos();
            let a = (m1 as f64 * c + m2 as f64 * s).abs();
            let rho = self.half_width / c.abs().max(s.abs());
            a.powf(gamma) * self.g(a * rho) + rho.powf(-gamma) / gamma
        })
    }
}

fn oracle_2d(gamma: f64, f: &SpectralField, images: usize) -> Result<OracleOutput> {
    let grid: &TorusGrid = f.grid();
    if gamma == 0.0 {
        return Ok(OracleOutput {
            field: f.clone(),
            constant: 1.0,
            tail_share: 0.0,
        });
    }
    check_gamma(gamma)?;
    let (n0, n1) = (grid.sizes()[0], grid.sizes()[1]);
    let c = kernel_constant(gamma, 2)?;
    let coeffs = direct_dft_2d(f.values(), n0, n1);
    let kmax = ((n0 / 2).pow(2) + (n1 / 2).pow(2)) as f64;
    let polar = Polar2d::new(gamma, images, kmax.sqrt());
    let mut cache: HashMap<(i64, i64), f64> = HashMap::new();
    let mut scaled = vec![Complex64::new(0.0, 0.0); n0 * n1];
    let mut tail_share: f64 = 0.0;
    for i0 in 0..n0 {
        for i1 in 0..n1 {
            let c_k = coeffs[i0 * n1 + i1];
            if c_k.norm() == 0.0 {
                continue;
            }
            let k0 = grid.wavenumber(0, i0).abs();
            let k1 = grid.wavenumber(1, i1).abs();
            let key = (k0.max(k1), k0.min(k1));
            let v = *cache.entry(key).or_insert_with(|| polar.mode_integral(key.0, key.1));
            let tail: f64 = 2.0 * PI * polar.half_width.powf(-gamma) / gamma;
            if v != 0.0 {
                tail_share = tail_share.max(tail / v);
            }
            scaled[i0 * n1 + i1] = c_k * (c * v);
        }
    }
    let values = direct_idft_2d(&scaled, n0, n1);
    Ok(OracleOutput {
        field: SpectralField::from_physical(grid, values)?,
        constant: c,
        tail_share,
    })
}

fn twiddle(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// Separable direct DFT with the `1/N` normalization.
fn direct_dft_2d(values: &[f64], n0: usize, n1: usize) -> Vec<Complex64> {
    let t0 = twiddle(n0, -1.0);
    let t1 = twiddle(n1, -1.0);
    let mut rows = vec![Complex64::new(0.0, 0.0); n0 * n1];
    for j0 in 0..n0 {
        for k1 in 0..n1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j1 in 0..n1 {
                acc += t1[(k1 * j1) % n1] * values[j0 * n1 + j1];
            }
            rows[j0 * n1 + k1] = acc;
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n0 * n1];
    let scale = 1.0 / (n0 * n1) as f64;
    for k0 in 0..n0 {
        for k1 in 0..n1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j0 in 0..n0 {
                acc += t0[(k0 * j0) % n0] * rows[j0 * n1 + k1];
            }
            out[k0 * n1 + k1] = acc * scale;
        }
    }
    out
}

fn direct_idft_2d(coeffs: &[Complex64], n0: usize, n1: usize) -> Vec<f64> {
    let t0 = twiddle(n0, 1.0);
    let t1 = twiddle(n1, 1.0);
    let mut cols = vec![Complex64::new(0.0, 0.0); n0 * n1];
    for j0 in 0..n0 {
        for k1 in 0..n1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k0 in 0..n0 {
                acc += t0[(k0 * j0) % n0] * coeffs[k0 * n1 + k1];
            }
            cols[j0 * n1 + k1] = acc;
        }
    }
    let mut out = vec![0.0; n0 * n1];
    for j0 in 0..n0 {
        for j1 in 0..n1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in 0..n1 {
                acc += t1[(k1 * j1) % n1] * cols[j0 * n1 + k1];
            }
            out[j0 * n1 + j1] = acc.re;
        }
    }
    out
}
