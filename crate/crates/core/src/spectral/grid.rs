use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Uniform grid on the torus `[0, 2π)^n`.
///
/// Samples are stored row-major with the last axis varying fastest. Along
/// axis `i` the index `j` sits at `x = 2πj/N_i` and carries the wavenumber
/// `j` for `j <= N_i/2` and `j - N_i` otherwise, so the Nyquist index maps
/// to `+N_i/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TorusGrid {
    sizes: Vec<usize>,
}

impl TryFrom<Vec<usize>> for TorusGrid {
    type Error = Error;

    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        TorusGrid::new(&sizes)
    }
}

impl From<TorusGrid> for Vec<usize> {
    fn from(g: TorusGrid) -> Self {
        g.sizes
    }
}

/// Integer wavevector with up to three components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wavevector {
    comps: [i64; MAX_DIM],
    dim: usize,
}

impl Wavevector {
    pub fn new(k: &[i64]) -> Self {
        assert!(!k.is_empty() && k.len() <= MAX_DIM, "wavevector dimension");
        let mut comps = [0; MAX_DIM];
        comps[..k.len()].copy_from_slice(k);
        Wavevector { comps, dim: k.len() }
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.comps[..self.dim]
    }

    pub fn norm_sq(&self) -> i64 {
        self.as_slice().iter().map(|k| k * k).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.as_slice().iter().all(|&k| k == 0)
    }
}

impl TorusGrid {
    /// Every size must be even and at least 8; one to three axes.
    pub fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.len() > MAX_DIM {
            return Err(Error::Grid(format!(
                "expected 1 to {MAX_DIM} axes, got {}",
                sizes.len()
            )));
        }
        if let Some(&n) = sizes.iter().find(|&&n| n < 8 || n % 2 != 0) {
            return Err(Error::Grid(format!("axis size {n} must be even and at least 8")));
        }
        Ok(TorusGrid { sizes: sizes.to_vec() })
    }

    /// Square grid with `n` points along each of `dim` axes.
    pub fn cube(n: usize, dim: usize) -> Result<Self> {
        Self::new(&vec![n; dim])
    }

    pub fn n_dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * PI / self.sizes[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.n_dim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.n_dim()).map(|a| self.spacing(a)).product()
    }

    /// `(2π)^n`, the factor between physical integrals and coefficient sums.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.n_dim() as i32)
    }

    pub fn wavenumber(&self, axis: usize, idx: usize) -> i64 {
        let n = self.sizes[axis];
        if idx <= n / 2 {
            idx as i64
        } else {
            idx as i64 - n as i64
        }
    }

    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        let mut rem = flat;
        for axis in (0..self.n_dim()).rev() {
            out[axis] = rem % self.sizes[axis];
            rem /= self.sizes[axis];
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.sizes).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn wavevector(&self, flat: usize) -> Wavevector {
        let idx = self.multi_index(flat);
        let mut k = [0i64; MAX_DIM];
        for axis in 0..self.n_dim() {
            k[axis] = self.wavenumber(axis, idx[axis]);
        }
        Wavevector::new(&k[..self.n_dim()])
    }

    /// Storage index of wavevector `k`, or `None` if it is not resolved.
    /// Both `±N_i/2` map to the Nyquist slot.
    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.n_dim() {
            return None;
        }
        let mut flat = 0;
        for (axis, &ki) in k.iter().enumerate() {
            let n = self.sizes[axis] as i64;
            if ki.abs() > n / 2 {
                return None;
            }
            flat = flat * n as usize + ki.rem_euclid(n) as usize;
        }
        Some(flat)
    }

    /// Storage index of `-k` for the wavevector stored at `flat`.
    pub fn partner(&self, flat: usize) -> usize {
        let idx = self.multi_index(flat);
        let mut out = 0;
        for (&n, &i) in self.sizes.iter().zip(&idx) {
            out = out * n + (n - i) % n;
        }
        out
    }

    /// Whether any component of the wavevector at `flat` is a Nyquist index.
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let idx = self.multi_index(flat);
        (0..self.n_dim()).any(|a| idx[a] == self.sizes[a] / 2)
    }

    /// Coordinates of the grid point at `flat`.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.n_dim() {
            x[axis] = idx[axis] as f64 * self.spacing(axis);
        }
        x
    }

    pub fn wavevectors(&self) -> impl Iterator<Item = Wavevector> + '_ {
        (0..self.len()).map(move |i| self.wavevector(i))
    }

    /// Largest wavenumber kept by the two-thirds rule along `axis`.
    pub fn dealias_cutoff(&self, axis: usize) -> i64 {
        (self.sizes[axis] / 3) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(TorusGrid::new(&[7]).is_err());
        assert!(TorusGrid::new(&[6]).is_err());
        assert!(TorusGrid::new(&[]).is_err());
        assert!(TorusGrid::new(&[8, 8, 8, 8]).is_err());
        assert!(TorusGrid::new(&[8, 16]).is_ok());
    }

    #[test]
    fn wavenumbers_and_partners() {
        let g = TorusGrid::new(&[8, 16]).unwrap();
        assert_eq!(g.wavenumber(0, 4), 4);
        assert_eq!(g.wavenumber(0, 5), -3);
        for flat in 0..g.len() {
            let k = g.wavevector(flat);
            assert_eq!(g.index_of(k.as_slice()), Some(flat));
            let p = g.partner(flat);
            assert_eq!(g.partner(p), flat);
            let kp = g.wavevector(p);
            for a in 0..2 {
                let n = g.sizes()[a] as i64;
                assert_eq!((k.as_slice()[a] + kp.as_slice()[a]).rem_euclid(n), 0);
            }
        }
        assert_eq!(g.index_of(&[-4, 0]), g.index_of(&[4, 0]));
        assert_eq!(g.index_of(&[5, 0]), None);
    }

    #[test]
    fn serde_roundtrip_validates() {
        let g: TorusGrid = serde_json::from_str("[16, 32]").unwrap();
        assert_eq!(g.sizes(), &[16, 32]);
        assert!(serde_json::from_str::<TorusGrid>("[15]").is_err());
    }
}
