//! Torus grids, Fourier transforms, multipliers and dealiasing.

mod fft;
mod field;
mod grid;
mod multiplier;

pub use field::{transform, Direction, Representation, SpectralField};
pub use grid::{TorusGrid, Wavevector, MAX_DIM};
pub use multiplier::{apply_multiplier, dealias, dealias_mask, Multiplier};

pub(crate) use fft::{forward_real, inverse_real};
pub(crate) use multiplier::dealias_coeffs;
