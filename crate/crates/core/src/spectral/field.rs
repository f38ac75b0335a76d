use num_complex::Complex64;

use super::fft;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Which representation a field was last built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Real scalar field on a torus grid, held as samples and Fourier
/// coefficients kept in sync.
///
/// `coeffs[i]` belongs to the wavevector `grid.wavevector(i)` and follows
/// `c(k) = (2π)^{-n} ∫ f e^{-ik·x} dx`, so physical integrals equal
/// `(2π)^n` times coefficient sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    phys: Vec<f64>,
    coeffs: Vec<Complex64>,
    source: Representation,
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

impl SpectralField {
    pub fn from_physical(grid: &TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        check_finite(&values)?;
        let coeffs = fft::forward_real(grid, &values);
        Ok(SpectralField {
            grid: grid.clone(),
            phys: values,
            coeffs,
            source: Representation::Physical,
        })
    }

    /// Samples `f` at every grid point; `f` sees `n_dim` coordinates.
    pub fn from_fn(grid: &TorusGrid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = grid.n_dim();
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..n])).collect();
        Self::from_physical(grid, values)
    }

    /// Builds a real field from coefficients, projecting onto the
    /// Hermitian-symmetric subspace first.
    pub fn from_coeffs(grid: &TorusGrid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.len()
            )));
        }
        if let Some(index) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite {
                index,
                value: coeffs[index].norm(),
            });
        }
        fft::symmetrize(grid, &mut coeffs);
        let phys = fft::inverse_real(grid, &coeffs);
        Ok(SpectralField {
            grid: grid.clone(),
            phys,
            coeffs,
            source: Representation::Spectral,
        })
    }

    pub fn constant(grid: &TorusGrid, value: f64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        coeffs[0] = Complex64::new(value, 0.0);
        SpectralField {
            grid: grid.clone(),
            phys: vec![value; grid.len()],
            coeffs,
            source: Representation::Physical,
        }
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.phys
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn source(&self) -> Representation {
        self.source
    }

    /// Coefficient at wavevector `k`, zero if `k` is not resolved.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.grid
            .index_of(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn into_values(self) -> Vec<f64> {
        self.phys
    }

    /// Spatial average, the zero mode.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Rectangle-rule integral of the samples.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.phys.iter().sum::<f64>()
    }

    pub fn grid_min(&self) -> f64 {
        self.phys.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn grid_max(&self) -> f64 {
        self.phys.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.phys.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise map of the samples.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_physical(&self.grid, self.phys.iter().map(|&v| f(v)).collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.phys.iter().zip(&other.phys).map(|(&a, &b)| f(a, b)).collect();
        Self::from_physical(&self.grid, values)
    }

    /// Pointwise product on the grid, without dealiasing.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    pub fn scale(&self, s: f64) -> Self {
        SpectralField {
            grid: self.grid.clone(),
            phys: self.phys.iter().map(|v| v * s).collect(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            source: self.source,
        }
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.same_grid(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x * a + y * b)
            .collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    /// `Σ_k |c(k)|²`; the physical `∫f²` is this times `(2π)^n`.
    pub fn spectral_sq_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rectangle-rule `∫ self·other dx`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self.grid.cell_volume() * self.phys.iter().zip(&other.phys).map(|(a, b)| a * b).sum::<f64>())
    }

    pub(crate) fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Dimension(format!(
                "grids {:?} and {:?} differ",
                self.grid.sizes(),
                other.grid.sizes()
            )));
        }
        Ok(())
    }
}

/// Recomputes one representation from the other.
///
/// `Forward` treats the samples as authoritative and rebuilds the
/// coefficients; `Inverse` does the opposite.
pub fn transform(field: &SpectralField, direction: Direction) -> Result<SpectralField> {
    match direction {
        Direction::Forward => SpectralField::from_physical(&field.grid, field.phys.clone()),
        Direction::Inverse => SpectralField::from_coeffs(&field.grid, field.coeffs.clone()),
    }
}
