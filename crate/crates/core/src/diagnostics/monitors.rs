use serde::Serialize;

use super::record::DiagnosticsRecord;
use crate::models::{Equation, ModelParams};
use crate::operators::kernel_constant;
use crate::timestep::Trajectory;
use crate::Result;

/// Largest rise between consecutive entries beyond `slack + rate·Δt`.
/// Zero for a sequence that is nonincreasing within that allowance.
pub fn max_increase(times: &[f64], values: &[f64], slack: f64, rate: f64) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| v[1] - v[0] - slack - rate * (t[1] - t[0]))
        .fold(0.0, f64::max)
}

pub fn is_nonincreasing(times: &[f64], values: &[f64], slack: f64, rate: f64) -> bool {
    max_increase(times, values, slack, rate) <= 0.0
}

fn column(traj: &Trajectory, f: impl Fn(&DiagnosticsRecord) -> f64) -> Vec<f64> {
    traj.records.iter().map(f).collect()
}

fn sup_abs(r: &DiagnosticsRecord) -> f64 {
    r.max.abs().max(r.min.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1CriterionReport {
    pub applicable: bool,
    pub reason: Option<String>,
    pub initial: f64,
    pub max: f64,
    /// `‖θ_x‖_{l¹} < ν` at every sample.
    pub below_nu: bool,
    pub max_increase: f64,
    pub nonincreasing: bool,
}

/// Tracks `‖θ_x‖_{l¹}` along a 1D `δ = 0` run.
pub fn l1_criterion_monitor(traj: &Trajectory, nu: f64) -> L1CriterionReport {
    let p = &traj.params;
    let reason = if p.equation != Equation::OneD {
        Some("the l¹ criterion is one-dimensional")
    } else if p.delta != 0.0 {
        Some("the l¹ criterion needs δ = 0")
    } else {
        None
    };
    let values = column(traj, |r| r.wiener_l1);
    let inc = max_increase(&traj.times, &values, 1e-10, 0.0);
    L1CriterionReport {
        applicable: reason.is_none(),
        reason: reason.map(String::from),
        initial: values.first().copied().unwrap_or(0.0),
        max: values.iter().copied().fold(0.0, f64::max),
        below_nu: values.iter().all(|&v| v < nu),
        max_increase: inc,
        nonincreasing: inc <= 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub applicable: bool,
    pub reason: Option<String>,
    /// Kernel normalisation used in `A`.
    pub constant: f64,
    pub a: f64,
    pub b: f64,
    /// Largest `(‖θ(t)‖_∞ − env(t)) / env(t)` over samples with `t > 0`.
    pub max_rel_excess: f64,
    pub violated: bool,
    pub sup_max_increase: f64,
    pub sup_nonincreasing: bool,
    /// Least-squares slope of `log(‖θ‖_∞ − mean)` against `log t` over the
    /// first half of the positive sample times. `None` with fewer than
    /// three usable samples.
    pub early_slope: Option<f64>,
}

impl EnvelopeReport {
    fn skipped(reason: &str) -> Self {
        EnvelopeReport {
            applicable: false,
            reason: Some(reason.into()),
            constant: f64::NAN,
            a: f64::NAN,
            b: f64::NAN,
            max_rel_excess: f64::NAN,
            violated: false,
            sup_max_increase: 0.0,
            sup_nonincreasing: true,
            early_slope: None,
        }
    }
}

/// `max{A t^{-1/γ}, B}` for `t > 0`.
pub fn envelope(a: f64, b: f64, gamma: f64, t: f64) -> f64 {
    (a * t.powf(-1.0 / gamma)).max(b)
}

/// Compares `‖θ(t)‖_∞` against the algebraic decay envelope for n-D
/// dissipative runs with nonnegative data.
pub fn decay_envelope_check(traj: &Trajectory, params: &ModelParams) -> Result<EnvelopeReport> {
    if !params.is_nd_dissipative() {
        return Ok(EnvelopeReport::skipped(
            "the envelope applies to the dissipative n-D model",
        ));
    }
    if !(params.nu > 0.0 && params.gamma > 0.0 && params.gamma < 2.0) {
        return Ok(EnvelopeReport::skipped("the envelope needs ν > 0 and 0 < γ < 2"));
    }
    let theta0 = traj.initial();
    if theta0.values().iter().any(|&v| v < 0.0) {
        return Ok(EnvelopeReport::skipped("the envelope needs θ₀ ≥ 0"));
    }
    let n = theta0.grid().n_dim() as i32;
    let gamma = params.gamma;
    let c = kernel_constant(gamma, n as usize)?;
    let l1 = theta0.grid().cell_volume() * theta0.values().iter().map(|v| v.abs()).sum::<f64>();
    let a = l1.powf(1.0 / n as f64) / (params.nu * c * gamma).powf(1.0 / gamma);
    let b = l1 / (2f64.powi(n - 2) * std::f64::consts::PI.powi(n));

    let sups = column(traj, sup_abs);
    let max_rel_excess = traj
        .times
        .iter()
        .zip(&sups)
        .filter(|(t, _)| **t > 0.0)
        .map(|(&t, &s)| {
            let e = envelope(a, b, gamma, t);
            (s - e) / e
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let inc = max_increase(&traj.times, &sups, 1e-8, 0.0);

    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.records)
        .zip(&sups)
        .filter(|((t, _), _)| **t > 0.0)
        .map(|((t, r), s)| (t.ln(), s - r.mean))
        .filter(|(_, d)| *d > 0.0)
        .map(|(lt, d)| (lt, d.ln()))
        .collect();
    let early = &pts[..pts.len().div_ceil(2)];
    let early_slope = (early.len() >= 3).then(|| {
        let m = early.len() as f64;
        let (sx, sy) = early.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let (sxy, sxx) = early.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
            (a + (x - mx) * (y - my), b + (x - mx).powi(2))
        });
        sxy / sxx
    });

    Ok(EnvelopeReport {
        applicable: true,
        reason: None,
        constant: c,
        a,
        b,
        max_rel_excess,
        violated: max_rel_excess > 0.0,
        sup_max_increase: inc,
        sup_nonincreasing: inc <= 0.0,
        early_slope,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremaReport {
    pub initial_min: f64,
    pub initial_max: f64,
    pub run_min: f64,
    pub run_max: f64,
    /// Largest drop between consecutive minima.
    pub min_max_decrease: f64,
    /// Largest rise between consecutive maxima.
    pub max_max_increase: f64,
}

impl ExtremaReport {
    /// `min θ(t) ≥ min θ₀ − slack` throughout.
    pub fn floor_holds(&self, slack: f64) -> bool {
        self.run_min >= self.initial_min - slack
    }

    pub fn min_nondecreasing(&self, slack: f64) -> bool {
        self.min_max_decrease <= slack
    }

    pub fn max_nonincreasing(&self, slack: f64) -> bool {
        self.max_max_increase <= slack
    }
}

pub fn extrema_check(traj: &Trajectory) -> ExtremaReport {
    let mins = column(traj, |r| r.min);
    let maxs = column(traj, |r| r.max);
    let neg: Vec<f64> = mins.iter().map(|v| -v).collect();
    ExtremaReport {
        initial_min: mins[0],
        initial_max: maxs[0],
        run_min: mins.iter().copied().fold(f64::INFINITY, f64::min),
        run_max: maxs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_max_decrease: max_increase(&traj.times, &neg, 0.0, 0.0),
        max_max_increase: max_increase(&traj.times, &maxs, 0.0, 0.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub l1_defined: bool,
    pub l1_max_increase: f64,
    pub l2_defined: bool,
    /// Largest `L₂(t) / (e^{-⟨θ₀⟩²t/2} L₂(θ₀)) − 1`.
    pub l2_excess: f64,
}

/// Checks the two Lyapunov functionals; `⟨θ₀⟩` is the spatial average.
pub fn lyapunov_check(traj: &Trajectory) -> LyapunovReport {
    let l1: Option<Vec<f64>> = traj.records.iter().map(|r| r.lyap1).collect();
    let l2: Option<Vec<f64>> = traj.records.iter().map(|r| r.lyap2).collect();
    let mean = traj.records[0].mean;
    let l2_excess = l2.as_ref().map_or(f64::NAN, |v| {
        traj.times
            .iter()
            .zip(v)
            .map(|(&t, &q)| q / ((-0.5 * mean * mean * t).exp() * v[0]) - 1.0)
            .fold(f64::NEG_INFINITY, f64::max)
    });
    LyapunovReport {
        l1_defined: l1.is_some(),
        l1_max_increase: l1.as_ref().map_or(f64::NAN, |v| max_increase(&traj.times, v, 0.0, 0.0)),
        l2_defined: l2.is_some(),
        l2_excess,
    }
}

/// `max_t |∫θ(t) − ∫θ₀|`.
pub fn mass_drift(traj: &Trajectory) -> f64 {
    let m0 = traj.records[0].mass;
    traj.records.iter().map(|r| (r.mass - m0).abs()).fold(0.0, f64::max)
}
