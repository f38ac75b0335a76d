use num_complex::Complex64;

use super::fft;
use super::field::SpectralField;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

const HERMITIAN_RTOL: f64 = 1e-12;

fn conj_close(a: Complex64, b: Complex64) -> bool {
    (a - b.conj()).norm() <= HERMITIAN_RTOL * a.norm().max(b.norm()).max(1e-300)
}

/// A Fourier multiplier tabulated on the resolved lattice of one grid.
///
/// Modes touching a Nyquist index whose partner `-k` folds onto a slot where
/// the symbol is not conjugate-symmetric are zeroed, which keeps the output
/// of real inputs real. For sgn-type symbols this zeroes the unpaired
/// `k = N/2` mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    grid: TorusGrid,
    values: Vec<Complex64>,
}

impl Multiplier {
    pub fn from_fn(grid: &TorusGrid, sigma: impl Fn(&[i64]) -> Complex64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for k in grid.wavevectors() {
            let s = sigma(k.as_slice());
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Err(Error::NonFiniteMultiplier(k.as_slice().to_vec()));
            }
            values.push(s);
        }
        for i in 0..values.len() {
            if !grid.touches_nyquist(i) {
                continue;
            }
            let p = grid.partner(i);
            if p == i {
                if values[i].im != 0.0 && values[i].im.abs() > HERMITIAN_RTOL * values[i].norm() {
                    values[i] = Complex64::new(0.0, 0.0);
                } else {
                    values[i].im = 0.0;
                }
            } else if p > i && !conj_close(values[i], values[p]) {
                values[i] = Complex64::new(0.0, 0.0);
                values[p] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(Multiplier {
            grid: grid.clone(),
            values,
        })
    }

    /// Real symbol, e.g. `|k|^γ`.
    pub fn from_real_fn(grid: &TorusGrid, sigma: impl Fn(&[i64]) -> f64) -> Result<Self> {
        Self::from_fn(grid, |k| Complex64::new(sigma(k), 0.0))
    }

    pub fn identity(grid: &TorusGrid) -> Self {
        Multiplier {
            grid: grid.clone(),
            values: vec![Complex64::new(1.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value_at(&self, k: &[i64]) -> Option<Complex64> {
        self.grid.index_of(k).map(|i| self.values[i])
    }

    /// Pointwise product of two symbols on the same grid.
    pub fn compose(&self, other: &Multiplier) -> Result<Multiplier> {
        if self.grid != other.grid {
            return Err(Error::Dimension("multipliers live on different grids".into()));
        }
        Ok(Multiplier {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// Whether `σ(-k) = conj σ(k)` holds on every stored mode.
    pub fn is_hermitian(&self) -> bool {
        (0..self.values.len()).all(|i| conj_close(self.values[i], self.values[self.grid.partner(i)]))
    }

    pub fn apply_coeffs(&self, coeffs: &mut [Complex64]) {
        for (c, s) in coeffs.iter_mut().zip(&self.values) {
            *c *= s;
        }
    }

    /// Applies the symbol and returns the real field it produces.
    ///
    /// Non-Hermitian symbols are rejected since their output is complex.
    pub fn apply(&self, field: &SpectralField) -> Result<SpectralField> {
        if field.grid() != &self.grid {
            return Err(Error::Dimension("field and multiplier grids differ".into()));
        }
        if !self.is_hermitian() {
            return Err(Error::Parameter(
                "multiplier is not conjugate-symmetric, output would be complex".into(),
            ));
        }
        let mut coeffs = field.coeffs().to_vec();
        self.apply_coeffs(&mut coeffs);
        SpectralField::from_coeffs(&self.grid, coeffs)
    }

    /// Complex physical output of the symbol, before any projection.
    pub fn apply_complex(&self, field: &SpectralField) -> Result<Vec<Complex64>> {
        if field.grid() != &self.grid {
            return Err(Error::Dimension("field and multiplier grids differ".into()));
        }
        let mut coeffs = field.coeffs().to_vec();
        self.apply_coeffs(&mut coeffs);
        Ok(fft::inverse_complex(&self.grid, &coeffs))
    }
}

/// `out(k) = σ(k)·c(k)` for a symbol given as a closure.
pub fn apply_multiplier(field: &SpectralField, sigma: impl Fn(&[i64]) -> Complex64) -> Result<SpectralField> {
    Multiplier::from_fn(field.grid(), sigma)?.apply(field)
}

/// Mask of modes kept by the two-thirds rule.
pub fn dealias_mask(grid: &TorusGrid) -> Vec<bool> {
    grid.wavevectors()
        .map(|k| {
            k.as_slice()
                .iter()
                .enumerate()
                .all(|(a, &ki)| ki.abs() <= grid.dealias_cutoff(a))
        })
        .collect()
}

pub(crate) fn dealias_coeffs(mask: &[bool], coeffs: &mut [Complex64]) {
    for (c, &keep) in coeffs.iter_mut().zip(mask) {
        if !keep {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Zeroes every mode with some `|k_i| > N_i/3`.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let mask = dealias_mask(field.grid());
    let mut coeffs = field.coeffs().to_vec();
    dealias_coeffs(&mask, &mut coeffs);
    SpectralField::from_coeffs(field.grid(), coeffs).expect("truncation keeps coefficients finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(n: usize, k: i64) -> SpectralField {
        let g = TorusGrid::new(&[n]).unwrap();
        SpectralField::from_fn(&g, |x| (k as f64 * x[0]).cos()).unwrap()
    }

    #[test]
    fn dealias_rule() {
        let gone = dealias(&mode(16, 7));
        assert!(gone.max_abs() < 1e-14, "{}", gone.max_abs());
        let kept = dealias(&mode(16, 5));
        assert!((kept.coeff(&[5]).re - 0.5).abs() < 1e-15);
        let one = SpectralField::constant(&TorusGrid::new(&[16]).unwrap(), 1.0);
        assert_eq!(
            dealias(&one),
            SpectralField::from_coeffs(one.grid(), one.coeffs().to_vec()).unwrap()
        );
    }

    #[test]
    fn abs_k_on_cosine() {
        let f = mode(32, 1);
        let out = apply_multiplier(&f, |k| Complex64::new(k[0].abs() as f64, 0.0)).unwrap();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn non_finite_symbol_names_wavevector() {
        let g = TorusGrid::new(&[8, 8]).unwrap();
        let err = Multiplier::from_real_fn(&g, |k| 1.0 / (k[0] as f64 - 2.0)).unwrap_err();
        match err {
            Error::NonFiniteMultiplier(k) => assert_eq!(k[0], 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn odd_symbol_zeroes_nyquist() {
        let g = TorusGrid::new(&[8]).unwrap();
        let m = Multiplier::from_fn(&g, |k| Complex64::new(0.0, (k[0].signum()) as f64)).unwrap();
        assert_eq!(m.value_at(&[4]).unwrap(), Complex64::new(0.0, 0.0));
        assert!(m.is_hermitian());
    }
}
