//! Pseudospectral laboratory for nonlocal active-scalar equations on the
//! periodic torus.

pub mod diagnostics;
pub mod error;
pub mod models;
pub mod operators;
pub mod scenarios;
pub mod spectral;
pub mod timestep;

pub use diagnostics::DiagnosticsRecord;
pub use error::{Error, Result};
pub use models::{Equation, ModelParams};
pub use operators::VelocityFamily;
pub use spectral::{SpectralField, TorusGrid};
pub use timestep::{run, StepperConfig, Termination, Trajectory};
