use num_complex::Complex64;
use serde::Serialize;

use super::record::DiagnosticsRecord;
use crate::models::{Equation, ModelParams};
use crate::operators::quadrature::cumulative_integral;
use crate::spectral::TorusGrid;
use crate::timestep::Trajectory;

/// Names of the balance identities, in report order.
pub const IDENTITY_NAMES: [&str; 6] = ["entropy", "l2", "hhalf", "entropy_shifted", "lyap2", "lyap1"];

/// Outcome of one balance identity along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: String,
    pub applicable: bool,
    /// Why the identity was skipped.
    pub reason: Option<String>,
    /// `|Q(t) - Q(0) - ∫_0^t R|` per sample.
    pub per_sample: Vec<f64>,
    pub max_abs: f64,
    /// `max_abs` divided by `scale`.
    pub max_rel: f64,
    /// Largest of `|Q|` and the accumulated `∫|R|` over the run.
    pub scale: f64,
    /// Largest accumulated contribution of the `ε` terms.
    pub eps_contribution: f64,
}

impl IdentityResidual {
    fn skipped(name: &str, reason: impl Into<String>) -> Self {
        IdentityResidual {
            name: name.into(),
            applicable: false,
            reason: Some(reason.into()),
            per_sample: Vec::new(),
            max_abs: 0.0,
            max_rel: 0.0,
            scale: 0.0,
            eps_contribution: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    pub identities: Vec<IdentityResidual>,
}

impl BalanceReport {
    pub fn get(&self, name: &str) -> Option<&IdentityResidual> {
        self.identities.iter().find(|r| r.name == name)
    }
}

/// A balance law `dQ/dt = R + ε R_ε` sampled at the record times.
struct Law<'a> {
    quantity: Column<'a>,
    rate: Column<'a>,
    eps_rate: Column<'a>,
}

type Column<'a> = Box<dyn Fn(&DiagnosticsRecord) -> Option<f64> + 'a>;

fn evaluate(name: &str, law: Law<'_>, times: &[f64], records: &[DiagnosticsRecord]) -> IdentityResidual {
    let collect =
        |f: &dyn Fn(&DiagnosticsRecord) -> Option<f64>| -> Option<Vec<f64>> { records.iter().map(f).collect() };
    let (Some(q), Some(r), Some(re)) = (collect(&*law.quantity), collect(&*law.rate), collect(&*law.eps_rate)) else {
        return IdentityResidual::skipped(name, "a required functional is undefined along the run");
    };
    let total: Vec<f64> = r.iter().zip(&re).map(|(a, b)| a + b).collect();
    let int_total = cumulative_integral(times, &total);
    let int_abs = cumulative_integral(times, &r.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let int_eps = cumulative_integral(times, &re);
    let per_sample: Vec<f64> = (0..q.len()).map(|i| (q[i] - q[0] - int_total[i]).abs()).collect();
    let max_abs = per_sample.iter().copied().fold(0.0, f64::max);
    let scale = q
        .iter()
        .map(|v| v.abs())
        .chain(int_abs.iter().copied())
        .fold(0.0, f64::max);
    IdentityResidual {
        name: name.into(),
        applicable: true,
        reason: None,
        per_sample,
        max_abs,
        max_rel: if scale > 0.0 { max_abs / scale } else { max_abs },
        scale,
        eps_contribution: int_eps.iter().fold(0.0f64, |m, v| m.max(v.abs())),
    }
}

/// Every balance identity applicable to the run's model, checked in the
/// physical-integral convention.
pub fn balance_residuals(traj: &Trajectory) -> BalanceReport {
    balance_residuals_for(&traj.params, &traj.times, &traj.records)
}

pub(crate) fn balance_residuals_for(p: &ModelParams, times: &[f64], records: &[DiagnosticsRecord]) -> BalanceReport {
    let (nu, eps) = (p.nu, p.epsilon);
    // Coefficient of the quadratic terms; zero in linear mode.
    let nl = if p.linear_only { 0.0 } else { 1.0 };
    let delta = p.delta * nl;
    let one_d = p.equation == Equation::OneD;
    let mut out = Vec::new();
    if records.len() < 2 {
        for name in IDENTITY_NAMES {
            out.push(IdentityResidual::skipped(name, "fewer than two samples"));
        }
        return BalanceReport { identities: out };
    }

    let nu_log = move |r: &DiagnosticsRecord| -> Option<f64> {
        if nu == 0.0 {
            Some(0.0)
        } else {
            r.terms.nu_log.map(|v| nu * v)
        }
    };
    out.push(if one_d && !(p.delta == 1.0 || p.linear_only) {
        IdentityResidual::skipped("entropy", "entropy balance needs δ = 1 in 1D")
    } else {
        evaluate(
            "entropy",
            Law {
                quantity: Box::new(|r| r.entropy),
                rate: Box::new(move |r| nu_log(r).map(|v| -delta * r.terms.lambda_half_sq - v)),
                eps_rate: Box::new(move |r| Some(-4.0 * eps * r.terms.sqrt_grad_sq)),
            },
            times,
            records,
        )
    });

    let cubic_coeff = if one_d { (0.5 - p.delta) * nl } else { -0.5 * delta };
    out.push(evaluate(
        "l2",
        Law {
            quantity: Box::new(|r| Some(0.5 * r.l2_phys * r.l2_phys)),
            rate: Box::new(move |r| Some(cubic_coeff * r.terms.cubic - nu * r.terms.lambda_gamma_sq)),
            eps_rate: Box::new(move |r| Some(-eps * r.terms.grad_sq)),
        },
        times,
        records,
    ));

    out.push(if !one_d {
        IdentityResidual::skipped("hhalf", "the Ḣ^{1/2} identity is one-dimensional")
    } else {
        let c1 = (0.5 - p.delta) * nl;
        evaluate(
            "hhalf",
            Law {
                quantity: Box::new(|r| Some(0.5 * r.terms.lambda_half_sq)),
                rate: Box::new(move |r| {
                    Some(
                        c1 * r.terms.theta_lambda_sq
                            - 0.5 * nl * r.terms.theta_grad_sq
                            - nu * r.terms.lambda_half_gamma_sq,
                    )
                }),
                eps_rate: Box::new(move |r| Some(-eps * r.terms.lambda_three_half_sq)),
            },
            times,
            records,
        )
    });

    out.push(if one_d || !(p.delta == 0.0 || p.linear_only) {
        IdentityResidual::skipped(
            "entropy_shifted",
            "shifted entropy balance needs the n-D model with δ = 0",
        )
    } else {
        evaluate(
            "entropy_shifted",
            Law {
                quantity: Box::new(|r| r.entropy_shifted),
                rate: Box::new(move |r| {
                    if nu == 0.0 {
                        Some(0.0)
                    } else {
                        r.terms.nu_log_shifted.map(|v| -nu * v)
                    }
                }),
                eps_rate: Box::new(move |r| r.terms.eps_log_shifted.map(|v| -eps * v)),
            },
            times,
            records,
        )
    });

    let lyap_ok = one_d && p.delta == 1.0 && nu == 0.0 && !p.linear_only;
    if lyap_ok {
        out.push(evaluate(
            "lyap2",
            Law {
                quantity: Box::new(|r| r.lyap2),
                rate: Box::new(|r| {
                    let q = r.lyap2?;
                    Some(-0.5 * r.terms.lyap2_weight? + 0.5 * r.mean * r.mean * q)
                }),
                eps_rate: Box::new(move |r| r.terms.lyap2_eps.map(|v| eps * v)),
            },
            times,
            records,
        ));
        out.push(evaluate(
            "lyap1",
            Law {
                quantity: Box::new(|r| r.lyap1),
                rate: Box::new(|r| r.terms.lyap1_weight.map(|v| -0.5 * v)),
                eps_rate: Box::new(move |r| r.terms.lyap1_eps.map(|v| eps * v)),
            },
            times,
            records,
        ));
    } else {
        for name in ["lyap2", "lyap1"] {
            out.push(IdentityResidual::skipped(
                name,
                "Lyapunov identities need the 1D model with δ = 1, ν = 0",
            ));
        }
    }
    BalanceReport { identities: out }
}

/// Writes per-sample residuals into the trajectory's records.
pub fn fill_residuals(traj: &mut Trajectory) {
    let report = balance_residuals(traj);
    for (i, rec) in traj.records.iter_mut().enumerate() {
        let pick = |name: &str| report.get(name).filter(|r| r.applicable).map(|r| r.per_sample[i]);
        rec.residuals.entropy = pick("entropy");
        rec.residuals.l2 = pick("l2");
        rec.residuals.hhalf = pick("hhalf");
        rec.residuals.lyap2 = pick("lyap2");
    }
}

/// `(Σ (1+|k|²)² |c_k|²)^{1/2}`.
pub fn h2_norm_of_coeffs(grid: &TorusGrid, coeffs: &[Complex64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| (1.0 + grid.wavevector(i).norm_sq() as f64).powi(2) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}
