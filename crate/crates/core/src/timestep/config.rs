use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Integrating-factor classical fourth-order Runge–Kutta.
    #[default]
    IfRk4,
}

fn default_safety() -> f64 {
    0.5
}

fn one() -> usize {
    1
}

fn default_blow_up() -> f64 {
    1e12
}

/// Time-stepping controls.
///
/// With `adaptive` set, `dt` is the accuracy cap and each step uses the
/// CFL estimate below it; otherwise every step uses `dt` except possibly a
/// shortened final step landing on `t_end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    #[serde(default)]
    pub scheme: Scheme,
    pub dt: f64,
    #[serde(default)]
    pub adaptive: bool,
    #[serde(default = "default_safety")]
    pub cfl_safety: f64,
    pub t_end: f64,
    /// Diagnostics are recorded every this many accepted steps.
    #[serde(default = "one")]
    pub snapshot_stride: usize,
    /// Of the recorded samples, every this many also keep the field.
    #[serde(default = "one")]
    pub field_stride: usize,
    /// Any norm beyond this ends the run as a suspected blow-up.
    #[serde(default = "default_blow_up")]
    pub blow_up_threshold: f64,
}

impl StepperConfig {
    pub fn fixed(dt: f64, t_end: f64) -> Self {
        StepperConfig {
            scheme: Scheme::IfRk4,
            dt,
            adaptive: false,
            cfl_safety: default_safety(),
            t_end,
            snapshot_stride: 1,
            field_stride: 1,
            blow_up_threshold: default_blow_up(),
        }
    }

    pub fn adaptive(max_dt: f64, t_end: f64, safety: f64) -> Self {
        StepperConfig {
            adaptive: true,
            cfl_safety: safety,
            ..Self::fixed(max_dt, t_end)
        }
    }

    pub fn with_stride(mut self, snapshot_stride: usize) -> Self {
        self.snapshot_stride = snapshot_stride;
        self
    }

    pub fn with_field_stride(mut self, field_stride: usize) -> Self {
        self.field_stride = field_stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::Parameter(s));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety));
        }
        if self.snapshot_stride == 0 || self.field_stride == 0 {
            return bad("strides must be at least 1".into());
        }
        if self.blow_up_threshold.is_nan() || self.blow_up_threshold <= 0.0 {
            return bad("blow_up_threshold must be positive".into());
        }
        Ok(())
    }

    /// Number of fixed steps and the length of the last one.
    pub(crate) fn fixed_schedule(&self) -> (usize, f64) {
        let ratio = self.t_end / self.dt;
        let rounded = ratio.round();
        if rounded >= 1.0 && (rounded - ratio).abs() <= 1e-9 * ratio {
            (rounded as usize, self.dt)
        } else {
            let n = ratio.ceil().max(1.0) as usize;
            (n, self.t_end - (n - 1) as f64 * self.dt)
        }
    }
}
