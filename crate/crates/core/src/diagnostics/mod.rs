//! Norms, functionals and run-level checks.

mod balance;
mod extrema;
mod monitors;
mod record;

pub use balance::{
    balance_residuals, fill_residuals, h2_norm_of_coeffs, BalanceReport, IdentityResidual, IDENTITY_NAMES,
};
pub use extrema::refined_extrema;
pub use monitors::{
    decay_envelope_check, envelope, extrema_check, is_nonincreasing, l1_criterion_monitor, lyapunov_check, mass_drift,
    max_increase, EnvelopeReport, ExtremaReport, L1CriterionReport, LyapunovReport,
};
pub use record::{
    functionals, lyap_offset, positivity_functional, BalanceTerms, DiagnosticsRecord, SampleResiduals, Sampler,
    LOG_FLOOR, SQRT_CLIP,
};
