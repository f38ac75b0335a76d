use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use super::config::{InitialShape, InitialSpec};
use crate::error::{Error, Result};
use crate::spectral::{dealias, SpectralField, TorusGrid};

/// What was done to the initial data and its key statistics, for run
/// metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialInfo {
    pub truncated: bool,
    /// Constant added by the nonnegativity shift.
    pub shift: f64,
    pub min: f64,
    pub max: f64,
    pub mass: f64,
    /// `Σ |k| |θ̂₀(k)|`.
    pub wiener_l1: f64,
}

/// Uniform draw in `[-amp, amp)` from the top 53 bits of one SplitMix64
/// output.
fn symmetric_uniform(rng: &mut SplitMix64, amp: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    amp * (2.0 * u - 1.0)
}

/// First nonzero component positive.
fn is_canonical(k: &[i64]) -> bool {
    k.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Seeded trigonometric polynomial. Modes are visited in storage order
/// (row-major, last axis fastest); each canonical `k` with
/// `1 ≤ |k| ≤ k_max` below the Nyquist index draws the real part and then
/// the imaginary part, and `-k` gets the conjugate. SplitMix64 is seeded
/// with the state equal to `seed`.
pub fn random_trig(grid: &TorusGrid, k_max: f64, amp: f64, mean: f64, seed: u64) -> Result<SpectralField> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    c[0] = Complex64::new(mean, 0.0);
    for i in 0..grid.len() {
        let k = grid.wavevector(i);
        let r = k.norm();
        if !is_canonical(k.as_slice()) || r > k_max || grid.touches_nyquist(i) {
            continue;
        }
        let re = symmetric_uniform(&mut rng, amp);
        let im = symmetric_uniform(&mut rng, amp);
        c[i] = Complex64::new(re, im);
        c[grid.partner(i)] = Complex64::new(re, -im);
    }
    SpectralField::from_coeffs(grid, c)
}

fn shape_field(grid: &TorusGrid, shape: &InitialShape, seed: u64) -> Result<SpectralField> {
    let n = grid.n_dim();
    match shape {
        InitialShape::Constant { c } => Ok(SpectralField::constant(grid, *c)),
        InitialShape::Cosine { c, a, k } => {
            let k = k.resolve(n)?;
            SpectralField::from_fn(grid, |x| {
                let arg: f64 = k.iter().zip(x).map(|(k, x)| *k as f64 * x).sum();
                c + a * arg.cos()
            })
        }
        InitialShape::RandomTrig { k_max, amp, mean } => random_trig(grid, *k_max, *amp, *mean, seed),
        InitialShape::Bump {
            center,
            width,
            height,
            floor,
        } => {
            if width.is_nan() || *width <= 0.0 {
                return Err(Error::Config("bump width must be positive".into()));
            }
            let center = center.resolve(n)?;
            SpectralField::from_fn(grid, |x| {
                let s: f64 = center.iter().zip(x).map(|(c, x)| (x - c).cos() - 1.0).sum();
                floor + height * (s / (width * width)).exp()
            })
        }
    }
}

/// Builds `θ₀`: shape, optional truncation to the dealiased band, optional
/// upward shift, then validation of the requested lower bounds on the grid.
pub fn make_initial(spec: &InitialSpec, grid: &TorusGrid) -> Result<(SpectralField, InitialInfo)> {
    let mut f = shape_field(grid, &spec.shape, spec.seed).map_err(|e| match e {
        Error::NonFinite { .. } => Error::Config(format!("initial data: {e}")),
        other => other,
    })?;
    if spec.truncate {
        f = dealias(&f);
    }
    let mut shift = 0.0;
    if spec.nonneg_shift {
        let floor = spec.shift_floor.max(spec.m0_floor.unwrap_or(0.0));
        let min = f.grid_min();
        if min < floor {
            shift = floor - min;
            f = f.map(|v| v + shift)?;
        }
    }
    let min = f.grid_min();
    if spec.require_nonneg && min < 0.0 {
        return Err(Error::Config(format!(
            "initial data has minimum {min:e}; nonnegative data was required (enable nonneg_shift)"
        )));
    }
    if let Some(m0) = spec.m0_floor {
        if min < m0 {
            return Err(Error::Config(format!(
                "initial data has minimum {min:e}, below the required floor {m0:e}"
            )));
        }
    }
    let wiener_l1 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| grid.wavevector(i).norm() * c.norm())
        .sum();
    let info = InitialInfo {
        truncated: spec.truncate,
        shift,
        min,
        max: f.grid_max(),
        mass: f.integral(),
        wiener_l1,
    };
    Ok((f, info))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::config::KSpec;

    fn spec(shape: InitialShape) -> InitialSpec {
        InitialSpec {
            shape,
            seed: 42,
            truncate: true,
            nonneg_shift: false,
            shift_floor: 0.0,
            require_nonneg: false,
            m0_floor: None,
        }
    }

    #[test]
    fn cosine_statistics() {
        let g = TorusGrid::new(&[64]).unwrap();
        let (f, info) = make_initial(
            &spec(InitialShape::Cosine {
                c: 1.0,
                a: 0.5,
                k: KSpec::Axis(1),
            }),
            &g,
        )
        .unwrap();
        assert!((info.min - 0.5).abs() < 1e-15);
        assert!((info.wiener_l1 - 0.5).abs() < 1e-14);
        assert!((f.mean() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_trig_is_seeded() {
        let g = TorusGrid::new(&[32, 32]).unwrap();
        let a = random_trig(&g, 8.0, 0.3, 0.0, 42).unwrap();
        let b = random_trig(&g, 8.0, 0.3, 0.0, 42).unwrap();
        let c = random_trig(&g, 8.0, 0.3, 0.0, 43).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
        assert!(a.mean().abs() < 1e-15);
        assert_eq!(a.coeff(&[9, 0]), Complex64::new(0.0, 0.0));
        assert_ne!(a.coeff(&[8, 0]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn nonnegativity_rules() {
        let g = TorusGrid::new(&[32]).unwrap();
        let mut s = spec(InitialShape::Cosine {
            c: 0.2,
            a: 1.0,
            k: KSpec::Axis(2),
        });
        s.require_nonneg = true;
        assert!(matches!(make_initial(&s, &g), Err(Error::Config(_))));
        s.nonneg_shift = true;
        let (f, info) = make_initial(&s, &g).unwrap();
        assert!(f.grid_min().abs() < 1e-15 && (info.shift - 0.8).abs() < 1e-14);
        s.m0_floor = Some(0.25);
        let (f, _) = make_initial(&s, &g).unwrap();
        assert!((f.grid_min() - 0.25).abs() < 1e-14);
    }
}
