//! Singular operators as Fourier multipliers, velocity families, and a
//! kernel-quadrature oracle that evaluates the same operators without
//! going through their symbols.

pub mod oracle;
pub mod quadrature;
pub mod symbols;
mod velocity;

pub use oracle::{kernel_constant, kernel_oracle, OracleOp};
pub use velocity::{velocity, VelocityFamily};

use crate::error::{Error, Result};
use crate::spectral::{Multiplier, SpectralField};

fn require_1d(f: &SpectralField, op: &str) -> Result<()> {
    if f.grid().n_dim() != 1 {
        return Err(Error::Dimension(format!(
            "{op} is defined on 1D grids, got {} axes",
            f.grid().n_dim()
        )));
    }
    Ok(())
}

/// Periodic Hilbert transform, symbol `-i sgn k`.
pub fn hilbert(f: &SpectralField) -> Result<SpectralField> {
    require_1d(f, "hilbert")?;
    Multiplier::from_fn(f.grid(), symbols::hilbert)?.apply(f)
}

/// `Λ^γ = (-Δ)^{γ/2}` for `γ >= 0`.
pub fn lambda_pow(f: &SpectralField, gamma: f64) -> Result<SpectralField> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::Parameter(format!(
            "lambda_pow needs a finite gamma >= 0, got {gamma}; use lambda_inv for the inverse"
        )));
    }
    Multiplier::from_real_fn(f.grid(), symbols::lambda_pow(gamma))?.apply(f)
}

/// `Λ^{-1}` with the log-sine kernel's zero mode.
pub fn lambda_inv(f: &SpectralField) -> Result<SpectralField> {
    require_1d(f, "lambda_inv")?;
    Multiplier::from_real_fn(f.grid(), symbols::lambda_inv)?.apply(f)
}

/// Riesz transform `R_j`, `j` counted from zero.
pub fn riesz(f: &SpectralField, j: usize) -> Result<SpectralField> {
    let n = f.grid().n_dim();
    if n < 2 {
        return Err(Error::Dimension("riesz needs at least 2 axes".into()));
    }
    if j >= n {
        return Err(Error::Parameter(format!("riesz index {j} out of range for {n} axes")));
    }
    Multiplier::from_fn(f.grid(), symbols::riesz(j))?.apply(f)
}

/// Spectral partial derivative along `axis`.
pub fn derivative(f: &SpectralField, axis: usize) -> Result<SpectralField> {
    if axis >= f.grid().n_dim() {
        return Err(Error::Parameter(format!("axis {axis} out of range")));
    }
    Multiplier::from_fn(f.grid(), symbols::derivative(axis))?.apply(f)
}

pub fn gradient(f: &SpectralField) -> Result<Vec<SpectralField>> {
    (0..f.grid().n_dim()).map(|a| derivative(f, a)).collect()
}

pub fn laplacian(f: &SpectralField) -> Result<SpectralField> {
    Multiplier::from_real_fn(f.grid(), symbols::laplacian)?.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    fn close(a: &SpectralField, b: &SpectralField, tol: f64) -> bool {
        a.values().iter().zip(b.values()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn closed_forms_1d() {
        let g = TorusGrid::new(&[32]).unwrap();
        let c1 = SpectralField::from_fn(&g, |x| x[0].cos()).unwrap();
        let s1 = SpectralField::from_fn(&g, |x| x[0].sin()).unwrap();
        assert!(close(&hilbert(&c1).unwrap(), &s1, 1e-14));
        assert!(close(&lambda_pow(&c1, 1.0).unwrap(), &c1, 1e-14));
        assert!(close(&lambda_inv(&c1).unwrap(), &c1, 1e-14));
        assert!(close(&hilbert(&s1.scale(-1.0)).unwrap(), &c1, 1e-14));

        let c3 = SpectralField::from_fn(&g, |x| (3.0 * x[0]).cos()).unwrap();
        let expect = c3.scale(3f64.sqrt());
        assert!(close(&lambda_pow(&c3, 0.5).unwrap(), &expect, 1e-13));

        let k = SpectralField::constant(&g, 2.5);
        assert!(hilbert(&k).unwrap().max_abs() < 1e-15);
        assert!(lambda_pow(&k, 1.0).unwrap().max_abs() < 1e-15);
        let inv1 = lambda_inv(&SpectralField::constant(&g, 1.0)).unwrap();
        assert!((inv1.values()[5] - 1.3862943611198906).abs() < 1e-14);
        assert!(lambda_pow(&k, -0.5).is_err());
    }

    #[test]
    fn riesz_2d() {
        let g = TorusGrid::new(&[16, 16]).unwrap();
        let c = SpectralField::from_fn(&g, |x| x[0].cos()).unwrap();
        let s = SpectralField::from_fn(&g, |x| x[0].sin()).unwrap();
        assert!(close(&riesz(&c, 0).unwrap(), &s, 1e-14));
        let flat_in_x0 = SpectralField::from_fn(&g, |x| (2.0 * x[1]).cos()).unwrap();
        assert!(riesz(&flat_in_x0, 0).unwrap().max_abs() < 1e-15);
        assert!(riesz(&c, 2).is_err());
        assert!(hilbert(&c).is_err());
    }
}
