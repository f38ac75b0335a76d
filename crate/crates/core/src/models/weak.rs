use serde::{Deserialize, Serialize};

use super::params::{Equation, ModelParams};
use crate::error::{Error, Result};
use crate::operators::{self, quadrature::integrate_samples};
use crate::spectral::{SpectralField, TorusGrid};
use crate::timestep::Trajectory;

/// `cos·cos(k·x) + sin·sin(k·x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// `η(t) = (1 − t/T)^p` on `[0, T]`, zero afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeProfile {
    pub t_end: f64,
    pub power: i32,
}

impl TimeProfile {
    pub fn quartic(t_end: f64) -> Self {
        TimeProfile { t_end, power: 4 }
    }

    pub fn eta(&self, t: f64) -> f64 {
        if t >= self.t_end {
            0.0
        } else {
            (1.0 - t / self.t_end).powi(self.power)
        }
    }

    pub fn eta_dot(&self, t: f64) -> f64 {
        if t >= self.t_end {
            0.0
        } else {
            -(self.power as f64) / self.t_end * (1.0 - t / self.t_end).powi(self.power - 1)
        }
    }
}

/// Separable test function `φ(x) η(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub spatial: Vec<TrigTerm>,
    pub temporal: TimeProfile,
}

/// `φ`, its gradient and `Lφ` for the model's linear symbol, on the grid.
struct Sampled {
    phi: Vec<f64>,
    grad: Vec<Vec<f64>>,
    linear: Vec<f64>,
}

impl TestFunction {
    fn check(&self, grid: &TorusGrid) -> Result<()> {
        let n = grid.n_dim();
        for term in &self.spatial {
            if term.k.len() != n {
                return Err(Error::Dimension(format!(
                    "test wavevector {:?} on a {n}-dimensional grid",
                    term.k
                )));
            }
            for (axis, &k) in term.k.iter().enumerate() {
                if k.abs() > grid.dealias_cutoff(axis) {
                    return Err(Error::Parameter(format!(
                        "test wavevector {:?} is not resolved on the grid",
                        term.k
                    )));
                }
            }
        }
        if !(self.temporal.t_end > 0.0 && self.temporal.power >= 2) {
            return Err(Error::Parameter("time profile needs T > 0 and power ≥ 2".into()));
        }
        Ok(())
    }

    fn sample(&self, grid: &TorusGrid, params: &ModelParams) -> Sampled {
        let n = grid.n_dim();
        let len = grid.len();
        let mut s = Sampled {
            phi: vec![0.0; len],
            grad: vec![vec![0.0; len]; n],
            linear: vec![0.0; len],
        };
        for term in &self.spatial {
            let l = params.linear_symbol(&term.k);
            for i in 0..len {
                let x = grid.point(i);
                let arg: f64 = (0..n).map(|a| term.k[a] as f64 * x[a]).sum();
                let (sn, cs) = arg.sin_cos();
                let v = term.cos * cs + term.sin * sn;
                let dv = term.sin * cs - term.cos * sn;
                s.phi[i] += v;
                s.linear[i] += l * v;
                for a in 0..n {
                    s.grad[a][i] += term.k[a] as f64 * dv;
                }
            }
        }
        s
    }
}

/// `∫ θ_t φ dx` in weak form, where only `φ` is differentiated beyond the
/// quadratic term's own derivative.
fn weak_rhs(theta: &SpectralField, params: &ModelParams, phi: &Sampled) -> Result<f64> {
    let grid = theta.grid();
    let vol = grid.cell_volume();
    let th = theta.values();
    let integral = |f: &dyn Fn(usize) -> f64| vol * (0..th.len()).map(f).sum::<f64>();
    let mut out = integral(&|i| th[i] * phi.linear[i]);
    if params.linear_only {
        return Ok(out);
    }
    let delta = params.delta;
    match params.equation {
        Equation::OneD => {
            let h = operators::hilbert(theta)?;
            let hv = h.values();
            if delta < 1.0 {
                let tx = operators::derivative(theta, 0)?;
                let txv = tx.values();
                out -= (1.0 - delta) * integral(&|i| hv[i] * txv[i] * phi.phi[i]);
            }
            if delta > 0.0 {
                out += delta * integral(&|i| th[i] * hv[i] * phi.grad[0][i]);
            }
        }
        Equation::NDim => {
            let n = grid.n_dim();
            if delta < 1.0 {
                let family = params.velocity.as_ref().expect("validated");
                let u = operators::velocity(family, theta)?;
                for (a, ua) in u.iter().enumerate().take(n) {
                    let uv = ua.values();
                    out += (1.0 - delta) * integral(&|i| th[i] * uv[i] * phi.grad[a][i]);
                }
            }
            if delta > 0.0 {
                for a in 0..n {
                    let r = operators::riesz(theta, a)?;
                    let rv = r.values();
                    out += delta * integral(&|i| th[i] * rv[i] * phi.grad[a][i]);
                }
            }
        }
    }
    Ok(out)
}

/// Distributional residual of a stored trajectory against each test
/// function:
///
/// `∫₀^T [⟨θ, φ⟩ η' + η ⟨θ_t, φ⟩_weak] dt + ⟨θ₀, φ⟩ η(0)`.
///
/// Time integrals use the stored field snapshots. The run must reach the
/// end of each profile's support with at least five snapshots inside it.
pub fn weak_form_residual(traj: &Trajectory, params: &ModelParams, tests: &[TestFunction]) -> Result<Vec<f64>> {
    let theta0 = traj.initial();
    let grid = theta0.grid();
    params.check_grid(grid)?;
    let mut out = Vec::with_capacity(tests.len());
    for test in tests {
        test.check(grid)?;
        let t_end = test.temporal.t_end;
        let tol = 1e-12 * t_end;
        if traj.final_time() < t_end - tol {
            return Err(Error::Parameter(format!(
                "trajectory ends at {} before the test support ends at {t_end}",
                traj.final_time()
            )));
        }
        let snaps: Vec<_> = traj.snapshots.iter().filter(|s| s.time <= t_end + tol).collect();
        if snaps.len() < 5 {
            return Err(Error::Parameter(format!(
                "{} snapshots inside the test support, need at least 5",
                snaps.len()
            )));
        }
        let phi = test.sample(grid, params);
        let phi_field = SpectralField::from_physical(grid, phi.phi.clone())?;
        let times: Vec<f64> = snaps.iter().map(|s| s.time).collect();
        let integrand = snaps
            .iter()
            .map(|s| {
                let pair = s.field.inner(&phi_field)?;
                let eta = test.temporal.eta(s.time);
                let f = if eta == 0.0 {
                    0.0
                } else {
                    weak_rhs(&s.field, params, &phi)?
                };
                Ok(pair * test.temporal.eta_dot(s.time) + eta * f)
            })
            .collect::<Result<Vec<f64>>>()?;
        let initial = theta0.inner(&phi_field)? * test.temporal.eta(0.0);
        out.push(integrate_samples(&times, &integrand) + initial);
    }
    Ok(out)
}
