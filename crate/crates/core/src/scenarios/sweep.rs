use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::output::{ensure_dir, fmt_f64, write_csv, write_json};
use super::run::{execute, write_outputs, ExitStatus, RunOutcome};
use crate::diagnostics::{balance_residuals, mass_drift};
use crate::error::{Error, Result};
use crate::operators::quadrature::integrate_samples;
use crate::timestep::Trajectory;

/// One point of the parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub epsilon: f64,
    pub nu: f64,
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
}

/// Expands the sweep block into child configurations, epsilon varying
/// slowest and seed fastest.
pub fn sweep_points(cfg: &RunConfig) -> Vec<(SweepPoint, RunConfig)> {
    let s = cfg.sweep.clone().unwrap_or_default();
    let or = |v: &Vec<f64>, base: f64| if v.is_empty() { vec![base] } else { v.clone() };
    let eps = or(&s.epsilon, cfg.model.epsilon);
    let nus = or(&s.nu, cfg.model.nu);
    let dts = or(&s.dt, cfg.stepper.dt);
    let ns = if s.n.is_empty() {
        vec![cfg.grid.sizes[0]]
    } else {
        s.n.clone()
    };
    let seeds = if s.seeds.is_empty() {
        vec![cfg.initial.seed]
    } else {
        s.seeds.clone()
    };
    let mut out = Vec::new();
    for &epsilon in &eps {
        for &nu in &nus {
            for &n in &ns {
                for &dt in &dts {
                    for &seed in &seeds {
                        let mut c = cfg.clone();
                        c.sweep = None;
                        c.model.epsilon = epsilon;
                        c.model.nu = nu;
                        if !s.n.is_empty() {
                            c.grid.sizes = vec![n; cfg.grid.sizes.len()];
                        }
                        c.stepper.dt = dt;
                        c.initial.seed = seed;
                        let index = out.len();
                        out.push((
                            SweepPoint {
                                index,
                                epsilon,
                                nu,
                                n,
                                dt,
                                seed,
                            },
                            c,
                        ));
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub status: ExitStatus,
    pub final_time: f64,
    pub steps: usize,
    pub mass_drift: f64,
    /// Relative residual per balance identity, `NaN` when skipped.
    pub res_entropy: f64,
    pub res_l2: f64,
    pub res_hhalf: f64,
    /// Largest weak-form defect when a `weak_form` check was configured.
    pub weak_form: f64,
    pub error: Option<String>,
}

/// `d(ε) = ‖θ^ε − θ^{ε/2}‖_{L²(0,T;L²)}` over the snapshot times the two
/// runs share.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyRow {
    pub epsilon: f64,
    pub epsilon_half: f64,
    pub d: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub cauchy: Vec<CauchyRow>,
    /// Whether `d(ε)` falls strictly as `ε` decreases; `None` with fewer
    /// than two rows.
    pub cauchy_strictly_decreasing: Option<bool>,
    pub status: ExitStatus,
}

/// Space-time `L²` distance on common snapshot times, trapezoid-corrected
/// in time and rectangle rule in space. `None` if the grids differ or
/// fewer than two times are shared.
pub fn cauchy_distance(a: &Trajectory, b: &Trajectory) -> Option<(f64, usize)> {
    let tol = 1e-9 * a.config.t_end.max(b.config.t_end);
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut j = 0;
    for sa in &a.snapshots {
        while j < b.snapshots.len() && b.snapshots[j].time < sa.time - tol {
            j += 1;
        }
        let Some(sb) = b.snapshots.get(j) else { break };
        if (sb.time - sa.time).abs() > tol {
            continue;
        }
        let diff = sa.field.sub(&sb.field).ok()?;
        times.push(sa.time);
        values.push(diff.inner(&diff).ok()?);
    }
    (times.len() >= 2).then(|| (integrate_samples(&times, &values).max(0.0).sqrt(), times.len()))
}

fn same_except_eps(a: &SweepPoint, b: &SweepPoint) -> bool {
    a.nu == b.nu && a.n == b.n && a.dt == b.dt && a.seed == b.seed
}

pub fn cauchy_table(points: &[(SweepPoint, &Trajectory)]) -> Vec<CauchyRow> {
    let mut rows = Vec::new();
    for (pa, ta) in points {
        let half = pa.epsilon / 2.0;
        let partner = points
            .iter()
            .find(|(pb, _)| same_except_eps(pa, pb) && (pb.epsilon - half).abs() <= 1e-12 * pa.epsilon);
        if let Some((_, tb)) = partner {
            if let Some((d, samples)) = cauchy_distance(ta, tb) {
                rows.push(CauchyRow {
                    epsilon: pa.epsilon,
                    epsilon_half: half,
                    d,
                    samples,
                });
            }
        }
    }
    rows.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    rows
}

fn summarize(point: SweepPoint, res: &Result<RunOutcome>) -> SweepRow {
    match res {
        Ok(o) => {
            let bal = balance_residuals(&o.trajectory);
            let rel = |name: &str| bal.get(name).filter(|r| r.applicable).map_or(f64::NAN, |r| r.max_rel);
            SweepRow {
                point,
                status: o.status,
                final_time: o.trajectory.final_time(),
                steps: o.trajectory.steps,
                mass_drift: mass_drift(&o.trajectory),
                res_entropy: rel("entropy"),
                res_l2: rel("l2"),
                res_hhalf: rel("hhalf"),
                weak_form: o
                    .checks
                    .iter()
                    .find(|c| c.name == "weak_form")
                    .map_or(f64::NAN, |c| c.value),
                error: None,
            }
        }
        Err(e) => SweepRow {
            point,
            status: ExitStatus::from_error(e),
            final_time: f64::NAN,
            steps: 0,
            mass_drift: f64::NAN,
            res_entropy: f64::NAN,
            res_l2: f64::NAN,
            res_hhalf: f64::NAN,
            weak_form: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every grid point on up to `workers` threads. Child failures are
/// recorded and the sweep carries on. Children write into
/// `dir/run_NNN`; the aggregate `summary.csv`, `cauchy.csv` and
/// `sweep_report.json` are written once all children finish.
pub fn cmd_sweep(cfg: &RunConfig, dir: &Path, workers: usize) -> Result<SweepReport> {
    cfg.validate()?;
    if cfg.sweep.is_none() {
        return Err(Error::Config("sweep requires a `sweep` block".into()));
    }
    ensure_dir(dir)?;
    let points = sweep_points(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<(SweepPoint, Result<RunOutcome>)> = pool.install(|| {
        points
            .into_par_iter()
            .map(|(p, c)| {
                let child = dir.join(format!("run_{:03}", p.index));
                let res = execute(&c).and_then(|o| write_outputs(&o, &child).map(|_| o));
                (p, res)
            })
            .collect()
    });

    let rows: Vec<SweepRow> = results.iter().map(|(p, r)| summarize(p.clone(), r)).collect();
    let finished: Vec<(SweepPoint, &Trajectory)> = results
        .iter()
        .filter_map(|(p, r)| r.as_ref().ok().map(|o| (p.clone(), &o.trajectory)))
        .collect();
    let cauchy = cauchy_table(&finished);
    let cauchy_strictly_decreasing = (cauchy.len() >= 2).then(|| cauchy.windows(2).all(|w| w[1].d < w[0].d));
    let status = rows.iter().map(|r| r.status).max().unwrap_or(ExitStatus::Pass);

    write_csv(
        &dir.join("summary.csv"),
        &[
            "index",
            "epsilon",
            "nu",
            "n",
            "dt",
            "seed",
            "status",
            "exit_code",
            "final_time",
            "steps",
            "mass_drift",
            "res_entropy",
            "res_l2",
            "res_hhalf",
            "weak_form",
            "error",
        ],
        rows.iter().map(|r| {
            vec![
                r.point.index.to_string(),
                fmt_f64(r.point.epsilon),
                fmt_f64(r.point.nu),
                r.point.n.to_string(),
                fmt_f64(r.point.dt),
                r.point.seed.to_string(),
                serde_json::to_value(r.status)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                r.status.code().to_string(),
                fmt_f64(r.final_time),
                r.steps.to_string(),
                fmt_f64(r.mass_drift),
                fmt_f64(r.res_entropy),
                fmt_f64(r.res_l2),
                fmt_f64(r.res_hhalf),
                fmt_f64(r.weak_form),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )?;
    write_csv(
        &dir.join("cauchy.csv"),
        &["epsilon", "epsilon_half", "d", "samples"],
        cauchy.iter().map(|c| {
            vec![
                fmt_f64(c.epsilon),
                fmt_f64(c.epsilon_half),
                fmt_f64(c.d),
                c.samples.to_string(),
            ]
        }),
    )?;
    let report = SweepReport {
        rows,
        cauchy,
        cauchy_strictly_decreasing,
        status,
    };
    write_json(&dir.join("sweep_report.json"), &report)?;
    Ok(report)
}
