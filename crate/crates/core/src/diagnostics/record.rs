use serde::Serialize;

use super::extrema::refined_extrema;
use crate::error::{Error, Result};
use crate::models::{Equation, ModelParams};
use crate::operators::{self, symbols};
use crate::spectral::{Multiplier, SpectralField};

/// Floor below which `√θ` is clipped in the Fisher-information term.
pub const SQRT_CLIP: f64 = 1e-14;
/// `|Λ^{-1}θ|` must exceed this everywhere for `log|Λ^{-1}θ|` to be used.
pub const LOG_FLOOR: f64 = 1e-12;

/// Instantaneous integrals entering the balance identities, all as
/// physical integrals over the torus.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BalanceTerms {
    /// `∫θΛθ = ‖Λ^{1/2}θ‖²`.
    pub lambda_half_sq: f64,
    /// `∫θΛ^γθ = ‖Λ^{γ/2}θ‖²`.
    pub lambda_gamma_sq: f64,
    /// `‖Λ^{(1+γ)/2}θ‖²`.
    pub lambda_half_gamma_sq: f64,
    /// `‖Λ^{3/2}θ‖²`.
    pub lambda_three_half_sq: f64,
    /// `∫|∇θ|²`.
    pub grad_sq: f64,
    /// `∫|∇√θ|²`, with `θ` clipped at [`SQRT_CLIP`].
    pub sqrt_grad_sq: f64,
    /// `∫θ²Λθ`.
    pub cubic: f64,
    /// `∫θ(Λθ)²`.
    pub theta_lambda_sq: f64,
    /// `∫θ|∇θ|²`.
    pub theta_grad_sq: f64,
    /// `∫Λ^γθ log θ`.
    pub nu_log: Option<f64>,
    /// `∫Λ^γθ log(θ+1)`.
    pub nu_log_shifted: Option<f64>,
    /// `∫|∇θ|²/(θ+1)`.
    pub eps_log_shifted: Option<f64>,
    /// `∫θ e^φ ((Hθ)² + θ²)` with `φ = Λ^{-1}θ`.
    pub lyap2_weight: Option<f64>,
    /// `∫(θ_xx - θΛθ) e^φ`.
    pub lyap2_eps: Option<f64>,
    /// `∫(θ/φ)((Hθ)² + θ² - ⟨θ⟩²)`.
    pub lyap1_weight: Option<f64>,
    /// `∫θ_xx log|φ| - ∫θΛθ/φ`.
    pub lyap1_eps: Option<f64>,
}

/// Absolute balance residuals at one sample; filled in after a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SampleResiduals {
    pub entropy: Option<f64>,
    pub l2: Option<f64>,
    pub hhalf: Option<f64>,
    pub lyap2: Option<f64>,
}

/// One time sample of norms, functionals and balance terms.
///
/// Sobolev norms follow the coefficient convention `Σ w(k)|θ̂(k)|²` and are
/// stored as norms, not squares. `l2_phys` is the physical `(∫θ²)^{1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub step: usize,
    pub mass: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub l2_spec: f64,
    pub l2_phys: f64,
    pub hhalf_semi: f64,
    pub hhalf: f64,
    pub h1: f64,
    pub h2: f64,
    pub wiener_l1: f64,
    pub hminus_half: Option<f64>,
    pub entropy: Option<f64>,
    pub entropy_shifted: Option<f64>,
    pub lyap1: Option<f64>,
    pub lyap2: Option<f64>,
    pub positivity: f64,
    pub terms: BalanceTerms,
    pub residuals: SampleResiduals,
}

fn spectral_sum(f: &SpectralField, w: impl Fn(f64) -> f64) -> f64 {
    let g = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| w(g.wavevector(i).norm()) * c.norm_sqr())
        .sum()
}

fn rect(f: &SpectralField, values: impl Iterator<Item = f64>) -> f64 {
    f.grid().cell_volume() * values.sum::<f64>()
}

/// `‖θ₀‖_∞ · ‖log|Λ^{-1}θ₀|‖_∞`, the offset added inside `L₁`. `None` in
/// n-D or when `Λ^{-1}θ₀` comes within [`LOG_FLOOR`] of zero.
pub fn lyap_offset(theta0: &SpectralField) -> Result<Option<f64>> {
    if theta0.grid().n_dim() != 1 {
        return Ok(None);
    }
    let phi = operators::lambda_inv(theta0)?;
    if phi.values().iter().any(|v| v.abs() < LOG_FLOOR) {
        return Ok(None);
    }
    let log_sup = phi.values().iter().fold(0.0f64, |m, v| m.max(v.abs().ln().abs()));
    Ok(Some(theta0.max_abs() * log_sup))
}

/// Norms and functionals of a single field. The `L₁` offset is taken from
/// `theta` itself and the balance terms use `γ = 1`.
pub fn functionals(theta: &SpectralField) -> Result<DiagnosticsRecord> {
    let params = match theta.grid().n_dim() {
        1 => ModelParams::dqg_1d(0.0, 1.0, 0.0, 0.0),
        _ => ModelParams::nd_dissipative(0.0, 1.0, crate::operators::VelocityFamily::Sqg, 0.0),
    };
    Sampler::new(theta, &params)?.record(0.0, 0, theta)
}

/// Evaluates records along a run with a fixed `L₁` offset.
#[derive(Debug, Clone)]
pub struct Sampler {
    gamma: f64,
    lyap_offset: Option<f64>,
    one_d: bool,
}

impl Sampler {
    pub fn new(theta0: &SpectralField, params: &ModelParams) -> Result<Self> {
        Ok(Sampler {
            gamma: params.gamma,
            lyap_offset: lyap_offset(theta0)?,
            one_d: params.equation == Equation::OneD || theta0.grid().n_dim() == 1,
        })
    }

    pub fn lyap_offset(&self) -> Option<f64> {
        self.lyap_offset
    }

    pub fn record(&self, t: f64, step: usize, theta: &SpectralField) -> Result<DiagnosticsRecord> {
        if let Some(index) = theta.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index,
                value: theta.values()[index],
            });
        }
        let grid = theta.grid();
        let vol = grid.volume();
        let gamma = self.gamma;
        let th = theta.values();
        let (min, max) = refined_extrema(theta);

        let l2sq = theta.spectral_sq_sum();
        let semi = spectral_sum(theta, |k| k);
        let hs = |s: f64| spectral_sum(theta, |k| (1.0 + k.powf(s)).powi(2)).sqrt();
        let wiener = theta
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| grid.wavevector(i).norm() * c.norm())
            .sum();

        let lam = operators::lambda_pow(theta, 1.0)?;
        let lam_g = operators::lambda_pow(theta, gamma)?;
        let grads = operators::gradient(theta)?;
        let grad_sq_pts: Vec<f64> = (0..th.len())
            .map(|i| grads.iter().map(|g| g.values()[i].powi(2)).sum())
            .collect();

        let nonneg = th.iter().all(|&v| v >= 0.0);
        let entropy = nonneg.then(|| {
            rect(
                theta,
                th.iter().map(|&v| if v > 0.0 { v * v.ln() - v + 1.0 } else { 1.0 }),
            )
        });
        let above_minus_one = th.iter().all(|&v| v > -1.0);
        let entropy_shifted = above_minus_one.then(|| rect(theta, th.iter().map(|&v| (v + 1.0) * (v + 1.0).ln())));
        let positivity = rect(theta, th.iter().zip(lam.values()).map(|(t, l)| t * t * l));

        let sqrt_field = theta.map(|v| v.max(SQRT_CLIP).sqrt())?;
        let sqrt_grads = operators::gradient(&sqrt_field)?;
        let sqrt_grad_sq = rect(
            theta,
            (0..th.len()).map(|i| sqrt_grads.iter().map(|g| g.values()[i].powi(2)).sum::<f64>()),
        );

        let mut terms = BalanceTerms {
            lambda_half_sq: vol * semi,
            lambda_gamma_sq: vol * spectral_sum(theta, |k| if k == 0.0 { 0.0 } else { k.powf(gamma) }),
            lambda_half_gamma_sq: vol * spectral_sum(theta, |k| k.powf(1.0 + gamma)),
            lambda_three_half_sq: vol * spectral_sum(theta, |k| k.powi(3)),
            grad_sq: vol * spectral_sum(theta, |k| k * k),
            sqrt_grad_sq,
            cubic: positivity,
            theta_lambda_sq: rect(theta, th.iter().zip(lam.values()).map(|(t, l)| t * l * l)),
            theta_grad_sq: rect(theta, th.iter().zip(&grad_sq_pts).map(|(t, g)| t * g)),
            nu_log: (th.iter().all(|&v| v > 0.0))
                .then(|| rect(theta, th.iter().zip(lam_g.values()).map(|(t, l)| l * t.ln()))),
            nu_log_shifted: above_minus_one
                .then(|| rect(theta, th.iter().zip(lam_g.values()).map(|(t, l)| l * (t + 1.0).ln()))),
            eps_log_shifted: above_minus_one
                .then(|| rect(theta, th.iter().zip(&grad_sq_pts).map(|(t, g)| g / (t + 1.0)))),
            ..BalanceTerms::default()
        };

        let (mut lyap1, mut lyap2, mut hminus_half) = (None, None, None);
        if self.one_d {
            let phi = operators::lambda_inv(theta)?;
            let h = operators::hilbert(theta)?;
            let txx = operators::laplacian(theta)?;
            let mean = theta.mean();
            let pv = phi.values();
            let ex: Vec<f64> = pv.iter().map(|p| p.exp()).collect();
            lyap2 = Some(rect(theta, th.iter().zip(&ex).map(|(t, e)| t * e)));
            terms.lyap2_weight = Some(rect(
                theta,
                (0..th.len()).map(|i| th[i] * ex[i] * (h.values()[i].powi(2) + th[i] * th[i])),
            ));
            terms.lyap2_eps = Some(rect(
                theta,
                (0..th.len()).map(|i| (txx.values()[i] - th[i] * lam.values()[i]) * ex[i]),
            ));
            // ‖θ‖_{Ḣ^{-1/2}}² as a physical integral.
            hminus_half = Some(vol * spectral_sum(theta, |k| if k == 0.0 { 0.0 } else { 1.0 / k }));
            if pv.iter().all(|p| p.abs() > LOG_FLOOR) {
                if let Some(offset) = self.lyap_offset {
                    lyap1 = Some(rect(theta, th.iter().zip(pv).map(|(t, p)| t * p.abs().ln() + offset)));
                }
                terms.lyap1_weight = Some(rect(
                    theta,
                    (0..th.len()).map(|i| th[i] / pv[i] * (h.values()[i].powi(2) + th[i] * th[i] - mean * mean)),
                ));
                terms.lyap1_eps = Some(rect(
                    theta,
                    (0..th.len()).map(|i| txx.values()[i] * pv[i].abs().ln() - th[i] * lam.values()[i] / pv[i]),
                ));
            }
        }

        Ok(DiagnosticsRecord {
            t,
            step,
            mass: theta.integral(),
            mean: theta.mean(),
            min,
            max,
            l2_spec: l2sq.sqrt(),
            l2_phys: rect(theta, th.iter().map(|v| v * v)).sqrt(),
            hhalf_semi: semi.sqrt(),
            hhalf: hs(0.5),
            h1: hs(1.0),
            h2: hs(2.0),
            wiener_l1: wiener,
            hminus_half: hminus_half.map(f64::sqrt),
            entropy,
            entropy_shifted,
            lyap1,
            lyap2,
            positivity,
            terms,
            residuals: SampleResiduals::default(),
        })
    }
}

/// `∫θ²Λθ` in 1D.
pub fn positivity_functional(theta: &SpectralField) -> Result<f64> {
    if theta.grid().n_dim() != 1 {
        return Err(Error::Dimension("positivity functional is one-dimensional".into()));
    }
    let lam = Multiplier::from_real_fn(theta.grid(), symbols::lambda_pow(1.0))?.apply(theta)?;
    Ok(rect(
        theta,
        theta.values().iter().zip(lam.values()).map(|(t, l)| t * t * l),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn closed_forms() {
        let g = TorusGrid::new(&[64]).unwrap();
        let one = functionals(&SpectralField::constant(&g, 1.0)).unwrap();
        assert!(one.entropy.unwrap().abs() < 1e-14);
        assert!((one.entropy_shifted.unwrap() - 2.0 * PI * 2.0 * LN_2).abs() < 1e-12);
        let two = functionals(&SpectralField::constant(&g, 2.0)).unwrap();
        assert!((two.entropy.unwrap() - 2.0 * PI * (2.0 * LN_2 - 1.0)).abs() < 1e-12);

        let c = functionals(&SpectralField::from_fn(&g, |x| x[0].cos()).unwrap()).unwrap();
        assert!((c.hhalf_semi.powi(2) - 0.5).abs() < 1e-14);
        assert!((c.wiener_l1 - 1.0).abs() < 1e-13);
        assert!(c.entropy.is_none());
        assert!((c.l2_phys.powi(2) - PI).abs() < 1e-12);

        let th = SpectralField::from_fn(&g, |x| 1.0 + 0.5 * x[0].cos()).unwrap();
        assert!((positivity_functional(&th).unwrap() - PI / 2.0).abs() < 1e-12);
        let r = functionals(&th).unwrap();
        assert!((r.terms.lambda_half_sq - 0.25 * PI).abs() < 1e-12);
        assert!((r.min - 0.5).abs() < 1e-14);
    }
}
