use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Multiplier, SpectralField, TorusGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

type SymbolFn = Box<dyn Fn(&[i64]) -> Vec<Complex64> + Send + Sync>;

/// One entry of a user-supplied velocity symbol: `m(k)` as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomEntry {
    pub k: Vec<i64>,
    pub m: Vec<[f64; 2]>,
}

/// Named Fourier multipliers `m(k)` with `û(k) = m(k) θ̂(k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawFamily", into = "RawFamily")]
pub enum VelocityFamily {
    /// `u = (-R₂θ, R₁θ)`.
    Sqg,
    /// `u = R^⊥R₁θ`.
    Ipm,
    /// `u = Λ^β R^⊥R₁θ`, `β > 0`.
    IpmSingular { beta: f64 },
    /// `u = (-Δ)^{-1} R^⊥R₁θ`.
    Stokes2d,
    /// `u = (-Δ)^{-1}(-R₁R₃, -R₂R₃, R₁² + R₂²)θ`.
    Stokes3d,
    /// `u = Λ^{2α-2} R^⊥R₁θ`, `α ∈ [0, 1]`.
    StokesAlpha { alpha: f64 },
    /// `u = ∇^⊥ Λ^{α-2} θ`, `α ∈ [0, 1]`.
    EulerAlpha { alpha: f64 },
    /// Magnetogeostrophic symbol; zero on the line `k₂ = k₃ = 0`.
    Mg,
    /// Tabulated symbol; unlisted wavevectors get `conj m(-k)` if `-k` is
    /// listed and zero otherwise.
    Custom {
        dim: usize,
        table: Vec<CustomEntry>,
        smoothing_order: Option<f64>,
    },
}

/// Wire form: struct variants only, so stray keys are rejected for every
/// family.
#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum RawFamily {
    Sqg {},
    Ipm {},
    IpmSingular {
        beta: f64,
    },
    Stokes2d {},
    Stokes3d {},
    StokesAlpha {
        alpha: f64,
    },
    EulerAlpha {
        alpha: f64,
    },
    Mg {},
    Custom {
        dim: usize,
        table: Vec<CustomEntry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        smoothing_order: Option<f64>,
    },
}

impl From<RawFamily> for VelocityFamily {
    fn from(r: RawFamily) -> Self {
        match r {
            RawFamily::Sqg {} => VelocityFamily::Sqg,
            RawFamily::Ipm {} => VelocityFamily::Ipm,
            RawFamily::IpmSingular { beta } => VelocityFamily::IpmSingular { beta },
            RawFamily::Stokes2d {} => VelocityFamily::Stokes2d,
            RawFamily::Stokes3d {} => VelocityFamily::Stokes3d,
            RawFamily::StokesAlpha { alpha } => VelocityFamily::StokesAlpha { alpha },
            RawFamily::EulerAlpha { alpha } => VelocityFamily::EulerAlpha { alpha },
            RawFamily::Mg {} => VelocityFamily::Mg,
            RawFamily::Custom {
                dim,
                table,
                smoothing_order,
            } => VelocityFamily::Custom {
                dim,
                table,
                smoothing_order,
            },
        }
    }
}

impl From<VelocityFamily> for RawFamily {
    fn from(v: VelocityFamily) -> Self {
        match v {
            VelocityFamily::Sqg => RawFamily::Sqg {},
            VelocityFamily::Ipm => RawFamily::Ipm {},
            VelocityFamily::IpmSingular { beta } => RawFamily::IpmSingular { beta },
            VelocityFamily::Stokes2d => RawFamily::Stokes2d {},
            VelocityFamily::Stokes3d => RawFamily::Stokes3d {},
            VelocityFamily::StokesAlpha { alpha } => RawFamily::StokesAlpha { alpha },
            VelocityFamily::EulerAlpha { alpha } => RawFamily::EulerAlpha { alpha },
            VelocityFamily::Mg => RawFamily::Mg {},
            VelocityFamily::Custom {
                dim,
                table,
                smoothing_order,
            } => RawFamily::Custom {
                dim,
                table,
                smoothing_order,
            },
        }
    }
}

fn norm_sq(k: &[i64]) -> f64 {
    k.iter().map(|&x| (x * x) as f64).sum()
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `R^⊥R₁` symbol, `(k₁k₂, -k₁²)/|k|²`.
fn ipm_symbol(k: &[i64]) -> Vec<Complex64> {
    let r2 = norm_sq(k);
    if r2 == 0.0 {
        return vec![ZERO; 2];
    }
    let (k1, k2) = (k[0] as f64, k[1] as f64);
    vec![real(k1 * k2 / r2), real(-k1 * k1 / r2)]
}

fn scaled(v: Vec<Complex64>, s: f64) -> Vec<Complex64> {
    v.into_iter().map(|c| c * s).collect()
}

impl VelocityFamily {
    pub fn dim(&self) -> usize {
        match self {
            VelocityFamily::Stokes3d | VelocityFamily::Mg => 3,
            VelocityFamily::Custom { dim, .. } => *dim,
            _ => 2,
        }
    }

    /// Exponent `β` in `|m(k)| ~ |k|^β`; `None` when the symbol is not of
    /// that homogeneous form.
    pub fn smoothing_order(&self) -> Option<f64> {
        match self {
            VelocityFamily::Sqg | VelocityFamily::Ipm => Some(0.0),
            VelocityFamily::IpmSingular { beta } => Some(*beta),
            VelocityFamily::Stokes2d | VelocityFamily::Stokes3d => Some(-2.0),
            VelocityFamily::StokesAlpha { alpha } => Some(2.0 * alpha - 2.0),
            VelocityFamily::EulerAlpha { alpha } => Some(alpha - 1.0),
            VelocityFamily::Mg => None,
            VelocityFamily::Custom { smoothing_order, .. } => *smoothing_order,
        }
    }

    /// Whether `sup_k |m(k)|` is finite over the whole lattice.
    pub fn is_bounded(&self) -> bool {
        match self {
            VelocityFamily::Mg => false,
            VelocityFamily::Custom { .. } => true,
            _ => self.smoothing_order().is_some_and(|b| b <= 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Parameter(what));
        match self {
            VelocityFamily::IpmSingular { beta } if !(*beta > 0.0 && beta.is_finite()) => {
                bad(format!("ipm_singular needs beta > 0, got {beta}"))
            }
            VelocityFamily::StokesAlpha { alpha } | VelocityFamily::EulerAlpha { alpha }
                if !(0.0..=1.0).contains(alpha) =>
            {
                bad(format!("alpha must lie in [0, 1], got {alpha}"))
            }
            VelocityFamily::Custom { dim, table, .. } => {
                if !(1..=3).contains(dim) {
                    return bad(format!("custom velocity dimension {dim} unsupported"));
                }
                for e in table {
                    if e.k.len() != *dim || e.m.len() != *dim {
                        return bad(format!("custom entry {:?} has the wrong length", e.k));
                    }
                    if e.m.iter().flatten().any(|v| !v.is_finite()) {
                        return bad(format!("custom entry {:?} is not finite", e.k));
                    }
                    let dot: Complex64 =
                        e.k.iter()
                            .zip(&e.m)
                            .map(|(&k, m)| Complex64::new(m[0], m[1]) * k as f64)
                            .sum();
                    let scale = norm_sq(&e.k).sqrt() * e.m.iter().map(|m| m[0].hypot(m[1])).fold(0.0, f64::max);
                    if dot.norm() > 1e-12 * scale.max(1e-300) {
                        return bad(format!("custom entry {:?} is not divergence-free", e.k));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Builds a closure evaluating `m(k)`.
    fn symbol_fn(&self) -> SymbolFn {
        match self.clone() {
            VelocityFamily::Sqg => Box::new(|k| {
                let r = norm_sq(k).sqrt();
                if r == 0.0 {
                    return vec![ZERO; 2];
                }
                vec![I * (k[1] as f64 / r), -I * (k[0] as f64 / r)]
            }),
            VelocityFamily::Ipm => Box::new(ipm_symbol),
            VelocityFamily::IpmSingular { beta } => Box::new(move |k| {
                let r2 = norm_sq(k);
                scaled(ipm_symbol(k), if r2 == 0.0 { 0.0 } else { r2.powf(0.5 * beta) })
            }),
            VelocityFamily::Stokes2d => Box::new(|k| {
                let r2 = norm_sq(k);
                scaled(ipm_symbol(k), if r2 == 0.0 { 0.0 } else { 1.0 / r2 })
            }),
            VelocityFamily::StokesAlpha { alpha } => Box::new(move |k| {
                let r2 = norm_sq(k);
                scaled(ipm_symbol(k), if r2 == 0.0 { 0.0 } else { r2.powf(alpha - 1.0) })
            }),
            VelocityFamily::EulerAlpha { alpha } => Box::new(move |k| {
                let r2 = norm_sq(k);
                if r2 == 0.0 {
                    return vec![ZERO; 2];
                }
                let s = r2.powf(0.5 * (alpha - 2.0));
                vec![-I * (k[1] as f64 * s), I * (k[0] as f64 * s)]
            }),
            VelocityFamily::Stokes3d => Box::new(|k| {
                let r2 = norm_sq(k);
                if r2 == 0.0 {
                    return vec![ZERO; 3];
                }
                let (k1, k2, k3) = (k[0] as f64, k[1] as f64, k[2] as f64);
                let d = r2 * r2;
                vec![real(k1 * k3 / d), real(k2 * k3 / d), real(-(k1 * k1 + k2 * k2) / d)]
            }),
            VelocityFamily::Mg => Box::new(|k| {
                let (k1, k2, k3) = (k[0] as f64, k[1] as f64, k[2] as f64);
                if k2 == 0.0 && k3 == 0.0 {
                    return vec![ZERO; 3];
                }
                let r2 = k1 * k1 + k2 * k2 + k3 * k3;
                let d = r2 * k3 * k3 + k2.powi(4);
                vec![
                    real((k2 * k3 * r2 - k1 * k2 * k2 * k3) / d),
                    real((-k1 * k3 * r2 - k2.powi(3) * k3) / d),
                    real((k1 * k1 * k2 * k2 + k2.powi(4)) / d),
                ]
            }),
            VelocityFamily::Custom { dim, table, .. } => {
                let map: HashMap<Vec<i64>, Vec<Complex64>> = table
                    .into_iter()
                    .map(|e| (e.k, e.m.iter().map(|m| Complex64::new(m[0], m[1])).collect()))
                    .collect();
                Box::new(move |k| {
                    if let Some(m) = map.get(k) {
                        return m.clone();
                    }
                    let neg: Vec<i64> = k.iter().map(|x| -x).collect();
                    match map.get(&neg) {
                        Some(m) => m.iter().map(|c| c.conj()).collect(),
                        None => vec![ZERO; dim],
                    }
                })
            }
        }
    }

    /// `m(k)` at a single wavevector.
    pub fn symbol(&self, k: &[i64]) -> Result<Vec<Complex64>> {
        if k.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{}-dimensional family evaluated at {k:?}",
                self.dim()
            )));
        }
        Ok(self.symbol_fn()(k))
    }

    fn check_grid(&self, grid: &TorusGrid) -> Result<()> {
        if grid.n_dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "velocity family is {}-dimensional, grid has {} axes",
                self.dim(),
                grid.n_dim()
            )));
        }
        Ok(())
    }

    /// One multiplier table per velocity component.
    ///
    /// A Nyquist mode dropped from one component is dropped from all of
    /// them, so the tabulated symbol stays divergence-free.
    pub fn tables(&self, grid: &TorusGrid) -> Result<Vec<Multiplier>> {
        self.validate()?;
        self.check_grid(grid)?;
        let sym = self.symbol_fn();
        let mut cache: Vec<Vec<Complex64>> = grid.wavevectors().map(|k| sym(k.as_slice())).collect();
        let build = |cache: &Vec<Vec<Complex64>>| -> Result<Vec<Multiplier>> {
            (0..self.dim())
                .map(|c| Multiplier::from_fn(grid, |k| cache[grid.index_of(k).expect("resolved wavevector")][c]))
                .collect()
        };
        let first = build(&cache)?;
        let mut dropped = false;
        for (i, m) in cache.iter_mut().enumerate() {
            if first
                .iter()
                .zip(m.iter())
                .any(|(t, raw)| t.values()[i] != *raw && t.values()[i].norm() == 0.0)
            {
                m.iter_mut().for_each(|c| *c = ZERO);
                dropped = true;
            }
        }
        if dropped {
            build(&cache)
        } else {
            Ok(first)
        }
    }

    /// `max_k |k·m(k)|` over the resolved lattice of `grid`.
    pub fn divergence_defect(&self, grid: &TorusGrid) -> Result<f64> {
        let tables = self.tables(grid)?;
        Ok(grid
            .wavevectors()
            .enumerate()
            .map(|(i, k)| {
                k.as_slice()
                    .iter()
                    .zip(&tables)
                    .map(|(&kj, t)| t.values()[i] * kj as f64)
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max))
    }

    /// `max_k |m(k)|` over the resolved lattice.
    pub fn sup_norm(&self, grid: &TorusGrid) -> Result<f64> {
        let tables = self.tables(grid)?;
        Ok((0..grid.len())
            .map(|i| tables.iter().map(|t| t.values()[i].norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max))
    }
}

/// Velocity components `û_i = m_i(k) θ̂(k)`.
pub fn velocity(family: &VelocityFamily, theta: &SpectralField) -> Result<Vec<SpectralField>> {
    family.tables(theta.grid())?.iter().map(|t| t.apply(theta)).collect()
}
