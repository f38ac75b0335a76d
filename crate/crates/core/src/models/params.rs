use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::VelocityFamily;
use crate::spectral::TorusGrid;

/// Which equation family the coefficients parameterize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `θ_t + (1-δ) Hθ θ_x + δ (θ Hθ)_x + ν Λ^γ θ = ε θ_xx` on the circle.
    OneD,
    /// `θ_t + (1-δ) u·∇θ + δ ∇·(θ Rθ) + ν Λ^γ θ = ε Δθ` on the 2D torus.
    NDim,
}

fn default_gamma() -> f64 {
    1.0
}

/// Equation selector and coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub equation: Equation,
    #[serde(default)]
    pub nu: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<VelocityFamily>,
    #[serde(default)]
    pub linear_only: bool,
}

impl ModelParams {
    /// Inviscid 1D model `θ_t + (θHθ)_x = εθ_xx`.
    pub fn qg_1d(epsilon: f64) -> Self {
        ModelParams {
            equation: Equation::OneD,
            nu: 0.0,
            gamma: 1.0,
            delta: 1.0,
            epsilon,
            velocity: None,
            linear_only: false,
        }
    }

    /// 1D model with dissipation `νΛ^γ` and divergence weight `δ`.
    pub fn dqg_1d(nu: f64, gamma: f64, delta: f64, epsilon: f64) -> Self {
        ModelParams {
            equation: Equation::OneD,
            nu,
            gamma,
            delta,
            epsilon,
            velocity: None,
            linear_only: false,
        }
    }

    /// 2D transport with divergence weight `δ` and no fractional dissipation.
    pub fn nd_transport(delta: f64, velocity: VelocityFamily, epsilon: f64) -> Self {
        ModelParams {
            equation: Equation::NDim,
            nu: 0.0,
            gamma: 1.0,
            delta,
            epsilon,
            velocity: Some(velocity),
            linear_only: false,
        }
    }

    /// 2D advection-dissipation `θ_t + u·∇θ + νΛ^γθ = εΔθ`.
    pub fn nd_dissipative(nu: f64, gamma: f64, velocity: VelocityFamily, epsilon: f64) -> Self {
        ModelParams {
            equation: Equation::NDim,
            nu,
            gamma,
            delta: 0.0,
            epsilon,
            velocity: Some(velocity),
            linear_only: false,
        }
    }

    pub fn with_linear_only(mut self, on: bool) -> Self {
        self.linear_only = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::Parameter(s));
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return bad(format!("nu must be finite and >= 0, got {}", self.nu));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be finite and >= 0, got {}", self.epsilon));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be finite and >= 0, got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return bad(format!("delta must lie in [0, 1], got {}", self.delta));
        }
        match (self.equation, &self.velocity) {
            (Equation::OneD, Some(_)) => bad("the 1D model takes no velocity family".into()),
            (Equation::NDim, None) => bad("the n-D model needs a velocity family".into()),
            (Equation::NDim, Some(v)) => v.validate(),
            _ => Ok(()),
        }
    }

    /// Parameters valid and compatible with `grid`.
    pub fn check_grid(&self, grid: &TorusGrid) -> Result<()> {
        self.validate()?;
        match self.equation {
            Equation::OneD if grid.n_dim() != 1 => Err(Error::Dimension(format!(
                "1D model on a grid with {} axes",
                grid.n_dim()
            ))),
            Equation::NDim if grid.n_dim() != 2 => Err(Error::Dimension(format!(
                "n-D evolution runs on 2D grids, got {} axes",
                grid.n_dim()
            ))),
            Equation::NDim => {
                let v = self.velocity.as_ref().expect("validated");
                if v.dim() != grid.n_dim() {
                    return Err(Error::Dimension(format!(
                        "velocity family is {}-dimensional, grid has {} axes",
                        v.dim(),
                        grid.n_dim()
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `δ = 1`, `ν = 0` in 1D.
    pub fn is_qg_1d(&self) -> bool {
        self.equation == Equation::OneD && self.delta == 1.0 && self.nu == 0.0
    }

    /// n-D with `δ > 0` and no fractional dissipation.
    pub fn is_nd_transport(&self) -> bool {
        self.equation == Equation::NDim && self.delta > 0.0 && self.nu == 0.0
    }

    /// n-D with `δ = 0` and `ν > 0`.
    pub fn is_nd_dissipative(&self) -> bool {
        self.equation == Equation::NDim && self.delta == 0.0 && self.nu > 0.0
    }

    /// Whether `∫θ` is conserved by the continuous dynamics.
    pub fn conserves_mass(&self) -> bool {
        self.linear_only
            || match self.equation {
                Equation::OneD => self.delta == 1.0,
                Equation::NDim => true,
            }
    }

    /// Real linear symbol `-(ν|k|^γ + ε|k|²)`.
    pub fn linear_symbol(&self, k: &[i64]) -> f64 {
        let r2: f64 = k.iter().map(|&x| (x * x) as f64).sum();
        let frac = if r2 == 0.0 {
            if self.gamma == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            r2.powf(0.5 * self.gamma)
        };
        -(self.nu * frac + self.epsilon * r2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModelParams::qg_1d(1e-3).validate().is_ok());
        assert!(ModelParams::dqg_1d(-1.0, 1.0, 0.5, 0.0).validate().is_err());
        assert!(ModelParams::dqg_1d(1.0, 1.0, 1.5, 0.0).validate().is_err());
        let mut p = ModelParams::qg_1d(0.0);
        p.equation = Equation::NDim;
        assert!(p.validate().is_err());
        let g2 = TorusGrid::new(&[16, 16]).unwrap();
        assert!(ModelParams::qg_1d(0.0).check_grid(&g2).is_err());
        let nd = ModelParams::nd_transport(0.5, VelocityFamily::Sqg, 0.0);
        assert!(nd.check_grid(&g2).is_ok());
        let g3 = TorusGrid::new(&[8, 8, 8]).unwrap();
        let nd3 = ModelParams::nd_transport(0.5, VelocityFamily::Stokes3d, 0.0);
        assert!(nd3.check_grid(&g3).is_err());
    }

    #[test]
    fn config_shape() {
        let p: ModelParams =
            serde_json::from_str(r#"{"equation":"n_dim","nu":1,"gamma":1,"velocity":{"family":"sqg"}}"#).unwrap();
        assert!(p.is_nd_dissipative());
        assert!(serde_json::from_str::<ModelParams>(r#"{"equation":"one_d","mu":1}"#).is_err());
    }
}
