use serde::Serialize;

use super::config::{CheckSpec, Quantity};
use crate::diagnostics::{
    balance_residuals, decay_envelope_check, extrema_check, l1_criterion_monitor, mass_drift, max_increase,
    DiagnosticsRecord,
};
use crate::error::Result;
use crate::models::{weak_form_residual, TestFunction, TimeProfile, TrigTerm};
use crate::spectral::SpectralField;
use crate::timestep::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Measured value compared against `threshold`.
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
    /// Failure means the run lost resolution rather than broke a check.
    pub resolution: bool,
}

impl CheckOutcome {
    fn upper(name: impl Into<String>, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            detail: detail.into(),
            resolution: false,
        }
    }

    fn not_applicable(name: impl Into<String>, reason: impl AsRef<str>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: false,
            value: f64::NAN,
            threshold: f64::NAN,
            detail: format!("not applicable: {}", reason.as_ref()),
            resolution: false,
        }
    }
}

fn quantity(r: &DiagnosticsRecord, q: Quantity) -> Option<f64> {
    match q {
        Quantity::Entropy => r.entropy,
        Quantity::EntropyShifted => r.entropy_shifted,
        Quantity::L2 => Some(r.l2_phys),
        Quantity::Hhalf => Some(r.hhalf),
        Quantity::WienerL1 => Some(r.wiener_l1),
        Quantity::Lyap1 => r.lyap1,
        Quantity::Sup => Some(r.max.abs().max(r.min.abs())),
        Quantity::Max => Some(r.max),
        Quantity::NegMin => Some(-r.min),
    }
}

/// Five single-mode tests `cos(k·x) + ½ sin(k·x)` against the quartic
/// profile ending at `t_end`.
pub fn default_weak_tests(n_dim: usize, t_end: f64) -> Vec<TestFunction> {
    let ks: Vec<Vec<i64>> = if n_dim == 1 {
        (1..=5).map(|k| vec![k]).collect()
    } else {
        vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 1], vec![1, 2]]
    };
    ks.into_iter()
        .map(|k| TestFunction {
            spatial: vec![TrigTerm { k, cos: 1.0, sin: 0.5 }],
            temporal: TimeProfile::quartic(t_end),
        })
        .collect()
}

/// Share of the non-mean energy held by modes with some `|k_i|` above two
/// thirds of the dealiasing cutoff.
pub fn spectral_tail(f: &SpectralField) -> f64 {
    let g = f.grid();
    let (mut tail, mut total) = (0.0, 0.0);
    for (i, c) in f.coeffs().iter().enumerate() {
        let k = g.wavevector(i);
        if k.is_zero() {
            continue;
        }
        let e = c.norm_sqr();
        total += e;
        if k.as_slice()
            .iter()
            .enumerate()
            .any(|(a, &x)| 3 * x.abs() > 2 * g.dealias_cutoff(a))
        {
            tail += e;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

pub fn evaluate_check(traj: &Trajectory, spec: &CheckSpec) -> Result<CheckOutcome> {
    let times = &traj.times;
    Ok(match spec {
        CheckSpec::Balance {
            identity,
            max_abs,
            max_rel,
        } => {
            let report = balance_residuals(traj);
            let name = format!("balance:{identity}");
            match report.get(identity) {
                Some(r) if r.applicable => {
                    let abs_ok = max_abs.map_or(true, |t| r.max_abs <= t);
                    let rel_ok = max_rel.map_or(true, |t| r.max_rel <= t);
                    let (value, threshold) = match (max_abs, max_rel) {
                        (_, Some(t)) => (r.max_rel, *t),
                        (Some(t), None) => (r.max_abs, *t),
                        (None, None) => (r.max_rel, f64::INFINITY),
                    };
                    CheckOutcome {
                        name,
                        passed: abs_ok && rel_ok,
                        value,
                        threshold,
                        detail: format!(
                            "max_abs {:e}, max_rel {:e}, ε part {:e}",
                            r.max_abs, r.max_rel, r.eps_contribution
                        ),
                        resolution: false,
                    }
                }
                Some(r) => CheckOutcome::not_applicable(name, r.reason.clone().unwrap_or_default()),
                None => CheckOutcome::not_applicable(name, "unknown identity"),
            }
        }
        CheckSpec::Mass { tol } => CheckOutcome::upper("mass", mass_drift(traj), *tol, "max |mass(t) − mass(0)|"),
        CheckSpec::MinFloor { slack } => {
            let ex = extrema_check(traj);
            CheckOutcome::upper(
                "min_floor",
                ex.initial_min - ex.run_min,
                *slack,
                format!("min θ₀ {:e}, smallest min θ(t) {:e}", ex.initial_min, ex.run_min),
            )
        }
        CheckSpec::Monotone {
            quantity: q,
            slack,
            rate,
        } => {
            let name = format!("monotone:{}", serde_json::to_value(q)?.as_str().unwrap_or("?"));
            let values: Option<Vec<f64>> = traj.records.iter().map(|r| quantity(r, *q)).collect();
            match values {
                Some(v) => CheckOutcome::upper(
                    name,
                    max_increase(times, &v, *slack, *rate),
                    0.0,
                    format!("largest rise beyond {slack:e} + {rate:e}·Δt"),
                ),
                None => CheckOutcome::not_applicable(name, "quantity undefined at some sample"),
            }
        }
        CheckSpec::Positivity { floor } => {
            if traj.initial().grid().n_dim() != 1 {
                CheckOutcome::not_applicable("positivity", "the positivity functional is one-dimensional")
            } else {
                let low = traj.records.iter().map(|r| r.positivity).fold(f64::INFINITY, f64::min);
                CheckOutcome {
                    name: "positivity".into(),
                    passed: low >= *floor,
                    value: low,
                    threshold: *floor,
                    detail: "smallest ∫θ²Λθ".into(),
                    resolution: false,
                }
            }
        }
        CheckSpec::L1Criterion { nu } => {
            let r = l1_criterion_monitor(traj, *nu);
            if !r.applicable {
                CheckOutcome::not_applicable("l1_criterion", r.reason.unwrap_or_default())
            } else {
                CheckOutcome {
                    name: "l1_criterion".into(),
                    passed: r.below_nu && r.nonincreasing,
                    value: r.max,
                    threshold: *nu,
                    detail: format!("initial {:e}, largest rise {:e}", r.initial, r.max_increase),
                    resolution: false,
                }
            }
        }
        CheckSpec::DecayEnvelope => {
            let r = decay_envelope_check(traj, &traj.params)?;
            if !r.applicable {
                CheckOutcome::not_applicable("decay_envelope", r.reason.unwrap_or_default())
            } else {
                CheckOutcome {
                    name: "decay_envelope".into(),
                    passed: !r.violated && r.sup_nonincreasing,
                    value: r.max_rel_excess,
                    threshold: 0.0,
                    detail: format!(
                        "A {:e}, B {:e}, c {:e}, sup rise {:e}",
                        r.a, r.b, r.constant, r.sup_max_increase
                    ),
                    resolution: false,
                }
            }
        }
        CheckSpec::WeakForm { tol, tests } => {
            let t_end = traj.config.t_end;
            let tests = tests
                .clone()
                .unwrap_or_else(|| default_weak_tests(traj.initial().grid().n_dim(), t_end));
            match weak_form_residual(traj, &traj.params, &tests) {
                Ok(res) => {
                    let worst = res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    CheckOutcome::upper("weak_form", worst, *tol, format!("{} test functions", res.len()))
                }
                Err(e) => CheckOutcome::not_applicable("weak_form", e.to_string()),
            }
        }
        CheckSpec::Resolution { max_tail } => {
            let worst = traj
                .snapshots
                .iter()
                .map(|s| spectral_tail(&s.field))
                .fold(0.0, f64::max);
            CheckOutcome {
                resolution: true,
                ..CheckOutcome::upper("resolution", worst, *max_tail, "largest outer-band energy share")
            }
        }
    })
}

pub fn evaluate_checks(traj: &Trajectory, specs: &[CheckSpec]) -> Result<Vec<CheckOutcome>> {
    specs.iter().map(|s| evaluate_check(traj, s)).collect()
}
