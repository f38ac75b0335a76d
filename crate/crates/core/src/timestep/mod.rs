//! Integrating-factor Runge–Kutta time stepping and trajectories.

mod config;
mod stepper;

pub use config::{Scheme, StepperConfig};
pub use stepper::{cfl_dt, linear_propagator, run, Observer, SampleView, Snapshot, Termination, Trajectory};
