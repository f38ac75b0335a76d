use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ModelParams, TestFunction};
use crate::spectral::TorusGrid;
use crate::timestep::StepperConfig;

/// One JSON run document. Unknown keys anywhere are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub grid: GridSpec,
    pub model: ModelParams,
    pub stepper: StepperConfig,
    pub initial: InitialSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Optional; must equal `sizes.len()` when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_dim: Option<usize>,
    pub sizes: Vec<usize>,
}

impl GridSpec {
    pub fn build(&self) -> Result<TorusGrid> {
        if let Some(n) = self.n_dim {
            if n != self.sizes.len() {
                return Err(Error::Config(format!(
                    "grid.n_dim = {n} but {} sizes were given",
                    self.sizes.len()
                )));
            }
        }
        TorusGrid::new(&self.sizes)
    }
}

/// A wavevector given either as a single integer (first axis) or a full
/// list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    Axis(i64),
    Vector(Vec<i64>),
}

impl KSpec {
    pub fn resolve(&self, n_dim: usize) -> Result<Vec<i64>> {
        match self {
            KSpec::Axis(k) => {
                let mut v = vec![0; n_dim];
                v[0] = *k;
                Ok(v)
            }
            KSpec::Vector(v) if v.len() == n_dim => Ok(v.clone()),
            KSpec::Vector(v) => Err(Error::Config(format!("wavevector {v:?} on a {n_dim}-dimensional grid"))),
        }
    }
}

/// A point given either as one coordinate repeated on every axis or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Uniform(f64),
    Vector(Vec<f64>),
}

impl PointSpec {
    pub fn resolve(&self, n_dim: usize) -> Result<Vec<f64>> {
        match self {
            PointSpec::Uniform(x) => Ok(vec![*x; n_dim]),
            PointSpec::Vector(v) if v.len() == n_dim => Ok(v.clone()),
            PointSpec::Vector(v) => Err(Error::Config(format!("point {v:?} on a {n_dim}-dimensional grid"))),
        }
    }
}

/// Shape of the initial field before truncation and shifting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialShape {
    Constant {
        c: f64,
    },
    /// `c + a cos(k·x)`.
    Cosine {
        c: f64,
        a: f64,
        k: KSpec,
    },
    /// `mean` plus coefficients drawn uniformly in `[-amp, amp]` for
    /// `1 ≤ |k| ≤ k_max`, real and imaginary parts separately.
    RandomTrig {
        k_max: f64,
        amp: f64,
        #[serde(default)]
        mean: f64,
    },
    /// `floor + height · exp((Σ cos(x_i − center_i) − n) / width²)`.
    Bump {
        center: PointSpec,
        width: f64,
        height: f64,
        #[serde(default)]
        floor: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub shape: InitialShape,
    /// Seed for `random_trig`.
    #[serde(default)]
    pub seed: u64,
    /// Truncate to `|k_i| ≤ N_i/3` before anything else.
    #[serde(default = "yes")]
    pub truncate: bool,
    /// Shift up so the grid minimum is at least `shift_floor`.
    #[serde(default)]
    pub nonneg_shift: bool,
    #[serde(default)]
    pub shift_floor: f64,
    /// Reject data with a negative grid sample.
    #[serde(default)]
    pub require_nonneg: bool,
    /// Reject data whose grid minimum is below this positive floor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0_floor: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Snapshots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Overridden by `--out`; falls back to `SCALARLAB_OUT`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Snapshots]
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            directory: None,
            formats: default_formats(),
        }
    }
}

impl OutputSpec {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

/// A per-sample quantity tracked by the `monotone` check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Entropy,
    EntropyShifted,
    L2,
    Hhalf,
    WienerL1,
    Lyap1,
    Sup,
    Max,
    NegMin,
}

/// Checks evaluated after a run. Each produces one pass/fail line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    /// A balance identity by name, bounded in absolute and/or relative terms.
    Balance {
        identity: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_abs: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_rel: Option<f64>,
    },
    Mass {
        tol: f64,
    },
    /// `min θ(t) ≥ min θ₀ − slack`.
    MinFloor {
        slack: f64,
    },
    /// No rise between samples beyond `slack + rate·Δt`.
    Monotone {
        quantity: Quantity,
        #[serde(default)]
        slack: f64,
        #[serde(default)]
        rate: f64,
    },
    /// `∫θ²Λθ ≥ floor` at every sample (1D).
    Positivity {
        floor: f64,
    },
    L1Criterion {
        nu: f64,
    },
    DecayEnvelope,
    WeakForm {
        tol: f64,
        /// Defaults to five single-mode tests with a quartic time profile.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tests: Option<Vec<TestFunction>>,
    },
    /// Share of non-mean spectral energy in the outer third of the
    /// dealiased band, at any stored snapshot. Failure is reported as a
    /// loss of resolution rather than a check failure.
    Resolution {
        max_tail: f64,
    },
}

/// Cartesian parameter grid; empty lists keep the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub nu: Vec<f64>,
    /// Points per axis; every axis of the base grid is replaced.
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub dt: Vec<f64>,
    #[serde(default)]
    pub seeds: Vec<u64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Schema-level checks that need no compute. Initial-data constraints
    /// are checked when the field is built.
    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        let grid = self.grid.build().map_err(as_config)?;
        self.model.validate().map_err(as_config)?;
        self.model.check_grid(&grid).map_err(as_config)?;
        self.stepper.validate().map_err(as_config)?;
        if let Some(m0) = self.initial.m0_floor {
            if m0.is_nan() || m0 <= 0.0 {
                return Err(Error::Config("initial.m0_floor must be positive".into()));
            }
        }
        if let Some(s) = &self.sweep {
            if s.n.iter().any(|&n| n < 8 || n % 2 == 1) {
                return Err(Error::Config("sweep.n entries must be even and at least 8".into()));
            }
            if s.epsilon.iter().chain(&s.nu).any(|v| !(*v >= 0.0 && v.is_finite())) {
                return Err(Error::Config(
                    "sweep coefficients must be finite and nonnegative".into(),
                ));
            }
            if s.dt.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::Config("sweep.dt entries must be positive".into()));
            }
        }
        for c in &self.checks {
            if let CheckSpec::Balance { identity, .. } = c {
                if !crate::diagnostics::IDENTITY_NAMES.contains(&identity.as_str()) {
                    return Err(Error::Config(format!("unknown balance identity {identity:?}")));
                }
            }
        }
        Ok(())
    }
}
