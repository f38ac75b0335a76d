use serde::Serialize;

use super::initial::random_trig;
use crate::error::{Error, Result};
use crate::operators::symbols::LAMBDA_INV_ZERO_MODE;
use crate::operators::{hilbert, kernel_constant, kernel_oracle, lambda_inv, lambda_pow, OracleOp};
use crate::spectral::{SpectralField, TorusGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRequest {
    pub op: OracleOp,
    pub n: usize,
    pub dim: usize,
    /// Largest image truncation; the table also shows `K/100` and `K/10`.
    pub images: usize,
    pub seeds: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub input: String,
    pub images: Vec<usize>,
    /// `max |kernel − multiplier| / max |multiplier|` per truncation.
    pub rel_max: Vec<f64>,
    /// Mean absolute discrepancy per truncation.
    pub abs_mean: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub op: String,
    pub gamma: Option<f64>,
    pub n: usize,
    pub dim: usize,
    pub rows: Vec<OracleRow>,
    /// Normalizing constant of the `Λ^γ` kernel.
    pub kernel_constant: Option<f64>,
    /// `Λ^{-1}` of the constant 1 through the log-sine kernel, next to the
    /// multiplier's zero-mode value.
    pub lambda_inv_zero_mode: Option<(f64, f64)>,
}

fn multiplier_form(op: OracleOp, f: &SpectralField) -> Result<SpectralField> {
    match op {
        OracleOp::Hilbert => hilbert(f),
        OracleOp::LambdaPow(g) => lambda_pow(f, g),
        OracleOp::LambdaInv => lambda_inv(f),
    }
}

pub fn truncation_ladder(images: usize) -> Vec<usize> {
    let mut k: Vec<usize> = [images / 100, images / 10, images]
        .into_iter()
        .filter(|&k| k >= 1)
        .collect();
    k.dedup();
    k
}

fn compare(op: OracleOp, f: &SpectralField, input: String, ladder: &[usize]) -> Result<OracleRow> {
    let reference = multiplier_form(op, f)?;
    let scale = reference.max_abs().max(f.max_abs()).max(f64::MIN_POSITIVE);
    let mut row = OracleRow {
        input,
        images: ladder.to_vec(),
        rel_max: Vec::new(),
        abs_mean: Vec::new(),
    };
    for &k in ladder {
        let out = kernel_oracle(op, f, k)?.field;
        let d: Vec<f64> = out
            .values()
            .iter()
            .zip(reference.values())
            .map(|(a, b)| (a - b).abs())
            .collect();
        row.rel_max.push(d.iter().copied().fold(0.0, f64::max) / scale);
        row.abs_mean.push(d.iter().sum::<f64>() / d.len() as f64);
    }
    Ok(row)
}

/// Kernel-against-multiplier table over single modes and seeded fields.
pub fn cmd_oracle(req: &OracleRequest) -> Result<OracleReport> {
    if !(req.dim == 1 || req.dim == 2) {
        return Err(Error::Config(format!("oracle supports 1 or 2 axes, got {}", req.dim)));
    }
    let grid = TorusGrid::cube(req.n, req.dim)?;
    let ladder = truncation_ladder(req.images);
    let modes: Vec<Vec<i64>> = if req.dim == 1 {
        (1..=4).map(|k| vec![k]).collect()
    } else {
        vec![vec![1, 0], vec![1, 1], vec![2, 1]]
    };
    let mut rows = Vec::new();
    for k in &modes {
        let f = SpectralField::from_fn(&grid, |x| {
            k.iter().zip(x).map(|(k, x)| *k as f64 * x).sum::<f64>().cos()
        })?;
        rows.push(compare(req.op, &f, format!("cos mode {k:?}"), &ladder)?);
    }
    for seed in 0..req.seeds {
        let f = random_trig(&grid, (req.n / 8).min(8) as f64, 0.3, 1.0, seed)?;
        rows.push(compare(req.op, &f, format!("random_trig seed {seed}"), &ladder)?);
    }
    let (op, gamma) = match req.op {
        OracleOp::Hilbert => ("hilbert", None),
        OracleOp::LambdaPow(g) => ("lambda_pow", Some(g)),
        OracleOp::LambdaInv => ("lambda_inv", None),
    };
    let kernel_constant = match gamma {
        Some(g) if g > 0.0 && g < 2.0 => Some(kernel_constant(g, req.dim)?),
        _ => None,
    };
    let lambda_inv_zero_mode = if matches!(req.op, OracleOp::LambdaInv) {
        let one = SpectralField::constant(&grid, 1.0);
        Some((
            kernel_oracle(OracleOp::LambdaInv, &one, req.images)?.field.mean(),
            LAMBDA_INV_ZERO_MODE,
        ))
    } else {
        None
    };
    Ok(OracleReport {
        op: op.into(),
        gamma,
        n: req.n,
        dim: req.dim,
        rows,
        kernel_constant,
        lambda_inv_zero_mode,
    })
}
