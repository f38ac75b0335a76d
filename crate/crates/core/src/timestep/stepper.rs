use num_complex::Complex64;
use serde::Serialize;

use super::config::StepperConfig;
use crate::diagnostics::{self, DiagnosticsRecord, Sampler};
use crate::error::{Error, Result};
use crate::models::{Equation, ModelParams, RhsEvaluator};
use crate::operators;
use crate::spectral::{inverse_real, Multiplier, SpectralField, TorusGrid};

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BlowUp { t: f64, norm: String, value: f64 },
    NumericError { t: f64, message: String },
}

impl Termination {
    pub fn is_completed(&self) -> bool {
        matches!(self, Termination::Completed)
    }
}

/// Field kept at a recorded sample.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub step: usize,
    /// Index of the matching entry in `Trajectory::records`.
    pub record: usize,
    pub field: SpectralField,
}

/// Output of [`run`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ModelParams,
    pub config: StepperConfig,
    pub times: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub records: Vec<DiagnosticsRecord>,
    pub termination: Termination,
    /// Accepted steps.
    pub steps: usize,
    /// `L₁` offset fixed from the initial field.
    pub lyap_offset: Option<f64>,
}

impl Trajectory {
    pub fn initial(&self) -> &SpectralField {
        &self.snapshots[0].field
    }

    pub fn last_field(&self) -> &SpectralField {
        &self.snapshots.last().expect("initial snapshot").field
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("initial time")
    }
}

/// Read-only view handed to observers at each recorded sample.
pub struct SampleView<'a> {
    pub step: usize,
    pub time: f64,
    pub field: &'a SpectralField,
    pub record: &'a DiagnosticsRecord,
}

pub trait Observer {
    fn observe(&mut self, sample: &SampleView<'_>);
}

impl<F: FnMut(&SampleView<'_>)> Observer for F {
    fn observe(&mut self, sample: &SampleView<'_>) {
        self(sample)
    }
}

/// `σ(k) = exp(-(ν|k|^γ + ε|k|²) dt)`.
pub fn linear_propagator(params: &ModelParams, grid: &TorusGrid, dt: f64) -> Result<Multiplier> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    Multiplier::from_real_fn(grid, |k| (params.linear_symbol(k) * dt).exp())
}

/// CFL step `safety·Δx / max(|u|_∞, |Hθ|_∞, |Rθ|_∞, 1e-8)`, capped by `cfg.dt`.
pub fn cfl_dt(theta: &SpectralField, params: &ModelParams, cfg: &StepperConfig) -> Result<f64> {
    let grid = theta.grid();
    let mut speed: f64 = 1e-8;
    match params.equation {
        Equation::OneD => speed = speed.max(operators::hilbert(theta)?.max_abs()),
        Equation::NDim => {
            let n = grid.n_dim();
            let mag = |comps: &[SpectralField]| {
                (0..grid.len())
                    .map(|i| comps.iter().map(|c| c.values()[i].powi(2)).sum::<f64>().sqrt())
                    .fold(0.0, f64::max)
            };
            if let Some(v) = &params.velocity {
                speed = speed.max(mag(&operators::velocity(v, theta)?));
            }
            let r: Vec<SpectralField> = (0..n).map(|j| operators::riesz(theta, j)).collect::<Result<_>>()?;
            speed = speed.max(mag(&r));
        }
    }
    Ok((cfg.cfl_safety * grid.min_spacing() / speed).min(cfg.dt))
}

struct Factors {
    dt: f64,
    half: Vec<f64>,
    full: Vec<f64>,
}

impl Factors {
    fn new(linear: &[f64], dt: f64) -> Self {
        let half: Vec<f64> = linear.iter().map(|l| (l * 0.5 * dt).exp()).collect();
        let full = half.iter().map(|h| h * h).collect();
        Factors { dt, half, full }
    }
}

/// One integrating-factor RK4 step of `c' = Lc + N(c)`.
fn if_rk4_step(eval: &RhsEvaluator, c: &[Complex64], f: &Factors) -> Result<Vec<Complex64>> {
    let dt = f.dt;
    let k1 = eval.nonlinear(c)?;
    let a: Vec<Complex64> = (0..c.len()).map(|i| f.half[i] * (c[i] + k1[i] * (0.5 * dt))).collect();
    let k2 = eval.nonlinear(&a)?;
    let b: Vec<Complex64> = (0..c.len()).map(|i| f.half[i] * c[i] + k2[i] * (0.5 * dt)).collect();
    let k3 = eval.nonlinear(&b)?;
    let d: Vec<Complex64> = (0..c.len())
        .map(|i| f.full[i] * c[i] + f.half[i] * k3[i] * dt)
        .collect();
    let k4 = eval.nonlinear(&d)?;
    Ok((0..c.len())
        .map(|i| f.full[i] * c[i] + (f.full[i] * k1[i] + f.half[i] * (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0))
        .collect())
}

/// Advances `theta0` to `cfg.t_end`, recording diagnostics every
/// `snapshot_stride` steps and at the final time.
///
/// Blow-up and non-finite states end the run early with the matching
/// [`Termination`]; invalid inputs are errors.
pub fn run(
    theta0: &SpectralField,
    params: &ModelParams,
    cfg: &StepperConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = theta0.grid().clone();
    let eval = RhsEvaluator::new(&grid, params)?;
    let sampler = Sampler::new(theta0, params)?;
    let mut traj = Trajectory {
        params: params.clone(),
        config: cfg.clone(),
        times: Vec::new(),
        snapshots: Vec::new(),
        records: Vec::new(),
        termination: Termination::Completed,
        steps: 0,
        lyap_offset: sampler.lyap_offset(),
    };

    let mut push =
        |traj: &mut Trajectory, t: f64, step: usize, field: SpectralField, force_field: bool| -> Result<()> {
            let record = sampler.record(t, step, &field)?;
            let idx = traj.records.len();
            for o in observers.iter_mut() {
                o.observe(&SampleView {
                    step,
                    time: t,
                    field: &field,
                    record: &record,
                });
            }
            traj.times.push(t);
            traj.records.push(record);
            if force_field || idx % cfg.field_stride == 0 {
                traj.snapshots.push(Snapshot {
                    time: t,
                    step,
                    record: idx,
                    field,
                });
            }
            Ok(())
        };
    push(&mut traj, 0.0, 0, theta0.clone(), true)?;

    let (n_fixed, last_dt) = cfg.fixed_schedule();
    let mut c = theta0.coeffs().to_vec();
    let mut t = 0.0;
    let mut step = 0usize;
    let mut factors: Option<Factors> = None;
    let mut field = theta0.clone();
    let t_tol = 1e-12 * cfg.t_end;

    while t < cfg.t_end - t_tol {
        let dt = if cfg.adaptive {
            cfl_dt(&field, params, cfg)?.min(cfg.t_end - t)
        } else if step + 1 == n_fixed {
            last_dt
        } else {
            cfg.dt
        };
        if factors.as_ref().map_or(true, |f| f.dt != dt) {
            factors = Some(Factors::new(eval.linear_symbol(), dt));
        }
        let next = match if_rk4_step(&eval, &c, factors.as_ref().expect("set above")) {
            Ok(v) => v,
            Err(Error::BlowUp(msg)) => {
                traj.termination = Termination::NumericError { t, message: msg };
                break;
            }
            Err(e) => return Err(e),
        };
        step += 1;
        t = if cfg.adaptive {
            t + dt
        } else if step == n_fixed {
            cfg.t_end
        } else {
            step as f64 * cfg.dt
        };
        c = next;
        let values = inverse_real(&grid, &c);
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            traj.termination = Termination::NumericError {
                t,
                message: format!("non-finite sample {bad}"),
            };
            break;
        }
        let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let h2 = diagnostics::h2_norm_of_coeffs(&grid, &c);
        field = SpectralField::from_coeffs(&grid, c.clone())?;
        let done = t >= cfg.t_end - t_tol;
        let blown = sup > cfg.blow_up_threshold || h2 > cfg.blow_up_threshold || !h2.is_finite();
        if blown || done || step % cfg.snapshot_stride == 0 {
            push(&mut traj, t, step, field.clone(), done || blown)?;
        }
        if blown {
            let (norm, value) = if sup > cfg.blow_up_threshold {
                ("sup", sup)
            } else {
                ("h2", h2)
            };
            traj.termination = Termination::BlowUp {
                t,
                norm: norm.into(),
                value,
            };
            break;
        }
    }
    traj.steps = step;
    diagnostics::fill_residuals(&mut traj);
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::VelocityFamily;

    #[test]
    fn propagator_values() {
        let g = TorusGrid::new(&[16]).unwrap();
        let p = ModelParams::dqg_1d(1.0, 1.5, 0.0, 0.0);
        let m = linear_propagator(&p, &g, 0.1).unwrap();
        assert!((m.value_at(&[1]).unwrap().re - (-0.1f64).exp()).abs() < 1e-15);
        let m0 = linear_propagator(&ModelParams::qg_1d(0.0), &g, 0.1).unwrap();
        assert!(m0.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn cfl_rules() {
        let p = ModelParams::qg_1d(0.0);
        let cfg = StepperConfig::adaptive(0.1, 1.0, 0.5);
        let g = TorusGrid::new(&[256]).unwrap();
        assert_eq!(cfl_dt(&SpectralField::zeros(&g), &p, &cfg).unwrap(), 0.1);
        let th = SpectralField::from_fn(&g, |x| x[0].cos()).unwrap();
        let dt = cfl_dt(&th, &p, &cfg).unwrap();
        assert!((dt - 0.5 * g.spacing(0)).abs() < 1e-12);
        let g2 = TorusGrid::new(&[512]).unwrap();
        let th2 = SpectralField::from_fn(&g2, |x| x[0].cos()).unwrap();
        assert!((cfl_dt(&th2, &p, &cfg).unwrap() * 2.0 - dt).abs() < 1e-12);
        let nd = ModelParams::nd_transport(0.5, VelocityFamily::Sqg, 0.0);
        let g3 = TorusGrid::new(&[32, 32]).unwrap();
        let th3 = SpectralField::from_fn(&g3, |x| x[0].cos()).unwrap();
        assert!((cfl_dt(&th3, &nd, &cfg).unwrap() - 0.5 * g3.spacing(0)).abs() < 1e-12);
    }

    #[test]
    fn linear_decay_is_exact() {
        let g = TorusGrid::new(&[32]).unwrap();
        let th = SpectralField::from_fn(&g, |x| x[0].cos()).unwrap();
        let p = ModelParams::dqg_1d(1.0, 1.5, 0.0, 0.0).with_linear_only(true);
        let traj = run(&th, &p, &StepperConfig::fixed(0.01, 1.0).with_stride(10), &mut []).unwrap();
        assert_eq!(traj.steps, 100);
        assert_eq!(traj.final_time(), 1.0);
        let e = (-1.0f64).exp();
        for (a, b) in traj.last_field().values().iter().zip(th.values()) {
            assert!((a - e * b).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_stay_put() {
        let g = TorusGrid::new(&[32]).unwrap();
        let th = SpectralField::constant(&g, 1.7);
        let traj = run(
            &th,
            &ModelParams::dqg_1d(0.5, 1.0, 0.5, 0.01),
            &StepperConfig::fixed(0.05, 0.5),
            &mut [],
        )
        .unwrap();
        assert!(traj.termination.is_completed());
        for v in traj.last_field().values() {
            assert!((v - 1.7).abs() < 1e-14);
        }
    }

    #[test]
    fn observers_see_every_sample() {
        let g = TorusGrid::new(&[16]).unwrap();
        let th = SpectralField::from_fn(&g, |x| 1.0 + 0.1 * x[0].cos()).unwrap();
        let mut seen = Vec::new();
        let mut obs = |s: &SampleView<'_>| seen.push(s.step);
        let cfg = StepperConfig::fixed(0.1, 0.95).with_stride(3);
        let traj = run(&th, &ModelParams::qg_1d(0.0), &cfg, &mut [&mut obs]).unwrap();
        assert_eq!(seen, vec![0, 3, 6, 9, 10]);
        assert!((traj.final_time() - 0.95).abs() < 1e-15);
    }

    #[test]
    fn blow_up_is_reported() {
        let g = TorusGrid::new(&[16]).unwrap();
        let th = SpectralField::from_fn(&g, |x| 1.0 + 0.5 * x[0].cos()).unwrap();
        let mut cfg = StepperConfig::fixed(0.01, 1.0);
        cfg.blow_up_threshold = 1.2;
        let traj = run(&th, &ModelParams::qg_1d(0.0), &cfg, &mut []).unwrap();
        assert!(matches!(traj.termination, Termination::BlowUp { .. }));
    }
}
