//! Run configuration, initial data, and the run/sweep/verify/oracle
//! commands with their on-disk formats.

mod checks;
mod config;
mod initial;
mod oracle;
mod output;
mod run;
mod sweep;
mod verify;

pub use checks::{default_weak_tests, evaluate_check, evaluate_checks, spectral_tail, CheckOutcome};
pub use config::{
    CheckSpec, GridSpec, InitialShape, InitialSpec, KSpec, OutputFormat, OutputSpec, PointSpec, Quantity, RunConfig,
    SweepSpec,
};
pub use initial::{make_initial, random_trig, InitialInfo};
pub use oracle::{cmd_oracle, truncation_ladder, OracleReport, OracleRequest, OracleRow};
pub use output::{
    fmt_f64, read_snapshot, record_row, write_json, write_records_csv, write_snapshot, SnapshotSidecar, CSV_HEADER,
};
pub use run::{cmd_run, execute, resolve_out_dir, write_outputs, ExitStatus, RunOutcome, INCOMPLETE_MARKER, OUT_ENV};
pub use sweep::{cauchy_distance, cauchy_table, cmd_sweep, sweep_points, CauchyRow, SweepPoint, SweepReport, SweepRow};
pub use verify::{
    cmd_verify, hilbert_identity_errors, tricomi_minus_defect, verify_field, IdentityRow, VerifyReport, VERIFY_SEEDS,
    VERIFY_SIZES, VERIFY_TOL,
};
