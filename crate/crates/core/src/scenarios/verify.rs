use serde::Serialize;

use super::initial::random_trig;
use crate::diagnostics::positivity_functional;
use crate::error::Result;
use crate::operators::{derivative, hilbert, lambda_inv, lambda_pow};
use crate::spectral::{SpectralField, TorusGrid};

/// Grid sizes covered by [`cmd_verify`].
pub const VERIFY_SIZES: [usize; 3] = [32, 64, 256];
pub const VERIFY_SEEDS: u64 = 100;
pub const VERIFY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub identity: String,
    pub n: usize,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Reported for reference only; does not affect the verdict.
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<IdentityRow>,
    pub passed: bool,
}

fn sup_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Seeded trig polynomial with a nonzero mean: modes up to `min(8, N/8)`
/// so every product below stays inside the dealiased band.
pub fn verify_field(grid: &TorusGrid, seed: u64) -> Result<SpectralField> {
    let n = grid.sizes()[0];
    let k_max = (n / 8).min(8) as f64;
    let mean = 2.0 * (seed as f64 / VERIFY_SEEDS as f64) - 1.0;
    random_trig(grid, k_max, 0.3, mean, seed)
}

/// Sup-norm errors of the Hilbert identities for one pair `(f, g)`:
/// `[H(Hf) = −f + ⟨f⟩, (Hf)_x = H(f_x), ⟨Hf⟩ = 0,
///   H(fHg + gHf) = HfHg − fg + ⟨f⟩⟨g⟩, ∫(Hf)g = −∫f(Hg)]`.
pub fn hilbert_identity_errors(f: &SpectralField, g: &SpectralField) -> Result<[f64; 5]> {
    let hf = hilbert(f)?;
    let hg = hilbert(g)?;
    let hhf = hilbert(&hf)?;
    let rhs1 = f.map(|v| -v + f.mean())?;
    let comm = sup_diff(&derivative(&hf, 0)?, &hilbert(&derivative(f, 0)?)?);
    let lhs = hilbert(&f.mul(&hg)?.add(&g.mul(&hf)?)?)?;
    let (mf, mg) = (f.mean(), g.mean());
    let rhs3 = hf.mul(&hg)?.sub(&f.mul(g)?)?.map(|v| v + mf * mg)?;
    Ok([
        sup_diff(&hhf, &rhs1),
        comm,
        hf.mean().abs(),
        sup_diff(&lhs, &rhs3),
        (hf.inner(g)? + f.inner(&hg)?).abs(),
    ])
}

/// Defect of the product identity with `−⟨f⟩⟨g⟩` in place of
/// `+⟨f⟩⟨g⟩`, which equals `2|⟨f⟩⟨g⟩|`.
pub fn tricomi_minus_defect(f: &SpectralField, g: &SpectralField) -> Result<f64> {
    let hf = hilbert(f)?;
    let hg = hilbert(g)?;
    let lhs = hilbert(&f.mul(&hg)?.add(&g.mul(&hf)?)?)?;
    let (mf, mg) = (f.mean(), g.mean());
    let rhs = hf.mul(&hg)?.sub(&f.mul(g)?)?.map(|v| v - mf * mg)?;
    Ok(sup_diff(&lhs, &rhs))
}

/// Runs the Hilbert and `Λ` identity suite on seeded fields for every size
/// in [`VERIFY_SIZES`].
pub fn cmd_verify() -> Result<VerifyReport> {
    let mut rows = Vec::new();
    let names = [
        "hilbert_involution",
        "hilbert_commutes_with_dx",
        "hilbert_mean_zero",
        "tricomi",
        "hilbert_antisymmetry",
    ];
    for &n in &VERIFY_SIZES {
        let grid = TorusGrid::new(&[n])?;
        let mut worst = [0.0f64; 8];
        for seed in 0..VERIFY_SEEDS {
            let f = verify_field(&grid, seed)?;
            let g = verify_field(&grid, seed + 10_000)?;
            for (w, e) in worst.iter_mut().zip(hilbert_identity_errors(&f, &g)?) {
                *w = w.max(e);
            }
            let lam = lambda_pow(&f, 1.0)?;
            worst[5] = worst[5].max(sup_diff(&lam, &hilbert(&derivative(&f, 0)?)?));
            let back = lambda_pow(&lambda_inv(&f)?, 1.0)?;
            worst[6] = worst[6].max(sup_diff(&back, &f.map(|v| v - f.mean())?));
            let shifted = f.map(|v| v - f.grid_min())?;
            worst[7] = worst[7].max((-positivity_functional(&shifted)?).max(0.0));
        }
        let mut push = |identity: &str, max_error: f64, tolerance: f64, informational: bool| {
            rows.push(IdentityRow {
                identity: identity.into(),
                n,
                samples: VERIFY_SEEDS as usize,
                max_error,
                tolerance,
                passed: max_error <= tolerance,
                informational,
            })
        };
        for (name, w) in names.iter().zip(worst) {
            push(name, w, VERIFY_TOL, false);
        }
        push("lambda_is_hilbert_dx", worst[5], VERIFY_TOL, false);
        push("lambda_of_lambda_inv", worst[6], VERIFY_TOL, false);
        push("positivity_nonneg_floor", worst[7], 1e-10, false);

        let one_plus_cos = SpectralField::from_fn(&grid, |x| 1.0 + x[0].cos())?;
        push(
            "tricomi_minus_mean_product",
            tricomi_minus_defect(&one_plus_cos, &one_plus_cos)?,
            VERIFY_TOL,
            true,
        );
    }
    let passed = rows.iter().all(|r| r.passed || r.informational);
    Ok(VerifyReport { rows, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_identity_on_cosines() {
        let g = TorusGrid::new(&[32]).unwrap();
        let c = SpectralField::from_fn(&g, |x| x[0].cos()).unwrap();
        let e = hilbert_identity_errors(&c, &c).unwrap();
        assert!(e.iter().all(|v| *v < 1e-14), "{e:?}");
        assert!(tricomi_minus_defect(&c, &c).unwrap() < 1e-14);
        let one = SpectralField::constant(&g, 1.0);
        assert!((tricomi_minus_defect(&one, &one).unwrap() - 2.0).abs() < 1e-14);
    }
}
