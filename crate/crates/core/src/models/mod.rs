//! Right-hand sides of the evolution equations and the weak-form residual
//! of computed trajectories.

mod params;
mod rhs;
mod weak;

pub use params::{Equation, ModelParams};
pub use rhs::{rhs, rhs_lambda_form, RhsEvaluator};
pub use weak::{weak_form_residual, TestFunction, TimeProfile, TrigTerm};
