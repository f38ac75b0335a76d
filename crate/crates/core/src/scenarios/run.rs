use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::checks::{evaluate_checks, CheckOutcome};
use super::config::{OutputFormat, RunConfig};
use super::initial::{make_initial, InitialInfo};
use super::output::{ensure_dir, write_json, write_records_csv, write_snapshot, CSV_HEADER};
use crate::diagnostics::{balance_residuals, IdentityResidual};
use crate::error::{Error, Result};
use crate::timestep::{run, Termination, Trajectory};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "SCALARLAB_OUT";

/// Name of the marker file present while a run directory is incomplete.
pub const INCOMPLETE_MARKER: &str = "INCOMPLETE";

/// Process exit contract shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Pass,
    CheckFailed,
    /// Blow-up, non-finite state or loss of resolution.
    BlowUp,
    ConfigError,
    IoError,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::CheckFailed => 2,
            ExitStatus::BlowUp => 3,
            ExitStatus::ConfigError => 4,
            ExitStatus::IoError => 5,
        }
    }

    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::Io { .. } | Error::Csv(_) => ExitStatus::IoError,
            Error::BlowUp(_) => ExitStatus::BlowUp,
            _ => ExitStatus::ConfigError,
        }
    }
}

/// `--out`, then the config's directory, then `SCALARLAB_OUT`, then
/// `./scalarlab-out`.
pub fn resolve_out_dir(cli: Option<&Path>, cfg: Option<&Path>) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| cfg.map(Path::to_path_buf))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("scalarlab-out"))
}

/// Everything a finished run produced, before anything is written.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub trajectory: Trajectory,
    pub initial: InitialInfo,
    pub checks: Vec<CheckOutcome>,
    pub status: ExitStatus,
}

fn status_of(traj: &Trajectory, checks: &[CheckOutcome]) -> ExitStatus {
    if !traj.termination.is_completed() || checks.iter().any(|c| c.resolution && !c.passed) {
        ExitStatus::BlowUp
    } else if checks.iter().any(|c| !c.passed) {
        ExitStatus::CheckFailed
    } else {
        ExitStatus::Pass
    }
}

/// Builds the initial data, integrates and evaluates the configured checks.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let (theta0, initial) = make_initial(&cfg.initial, &grid)?;
    let trajectory = run(&theta0, &cfg.model, &cfg.stepper, &mut [])?;
    let checks = evaluate_checks(&trajectory, &cfg.checks)?;
    let status = status_of(&trajectory, &checks);
    Ok(RunOutcome {
        config: cfg.clone(),
        trajectory,
        initial,
        checks,
        status,
    })
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    config: &'a RunConfig,
    initial: &'a InitialInfo,
    initial_regularization: &'static str,
    steps: usize,
    dt_sequence_length: usize,
    final_time: f64,
    records: usize,
    snapshots: usize,
    lyap_offset: Option<f64>,
    termination: &'a Termination,
    csv_columns: &'a [&'static str],
}

#[derive(Serialize)]
struct Report<'a> {
    label: Option<&'a str>,
    status: ExitStatus,
    exit_code: i32,
    termination: &'a Termination,
    checks: &'a [CheckOutcome],
    balance: Vec<BalanceSummary<'a>>,
}

#[derive(Serialize)]
struct BalanceSummary<'a> {
    name: &'a str,
    applicable: bool,
    reason: Option<&'a str>,
    max_abs: f64,
    max_rel: f64,
    scale: f64,
    eps_contribution: f64,
}

impl<'a> From<&'a IdentityResidual> for BalanceSummary<'a> {
    fn from(r: &'a IdentityResidual) -> Self {
        BalanceSummary {
            name: &r.name,
            applicable: r.applicable,
            reason: r.reason.as_deref(),
            max_abs: r.max_abs,
            max_rel: r.max_rel,
            scale: r.scale,
            eps_contribution: r.eps_contribution,
        }
    }
}

/// Writes `diagnostics.csv`, `snapshots/`, `metadata.json` and
/// `report.json` into `dir`. An `INCOMPLETE` marker stays behind if any
/// write fails.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    let marker = dir.join(INCOMPLETE_MARKER);
    fs::write(&marker, b"").map_err(|e| Error::io(&marker, e))?;
    let traj = &outcome.trajectory;
    let outputs = &outcome.config.outputs;
    if outputs.wants(OutputFormat::Csv) {
        write_records_csv(&dir.join("diagnostics.csv"), &traj.records)?;
    }
    if outputs.wants(OutputFormat::Snapshots) {
        let snap_dir = dir.join("snapshots");
        ensure_dir(&snap_dir)?;
        for (i, s) in traj.snapshots.iter().enumerate() {
            write_snapshot(&snap_dir, i, s)?;
        }
    }
    write_json(
        &dir.join("metadata.json"),
        &Metadata {
            version: env!("CARGO_PKG_VERSION"),
            config: &outcome.config,
            initial: &outcome.initial,
            initial_regularization: if outcome.config.initial.truncate {
                "spectral truncation to |k_i| <= N_i/3"
            } else {
                "none"
            },
            steps: traj.steps,
            dt_sequence_length: traj.steps,
            final_time: traj.final_time(),
            records: traj.records.len(),
            snapshots: traj.snapshots.len(),
            lyap_offset: traj.lyap_offset,
            termination: &traj.termination,
            csv_columns: &CSV_HEADER,
        },
    )?;
    let balance = balance_residuals(traj);
    write_json(
        &dir.join("report.json"),
        &Report {
            label: outcome.config.label.as_deref(),
            status: outcome.status,
            exit_code: outcome.status.code(),
            termination: &traj.termination,
            checks: &outcome.checks,
            balance: balance.identities.iter().map(BalanceSummary::from).collect(),
        },
    )?;
    fs::remove_file(&marker).map_err(|e| Error::io(&marker, e))
}

/// Runs one configuration and writes its artifacts into `dir`.
pub fn cmd_run(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    let outcome = execute(cfg)?;
    write_outputs(&outcome, dir)?;
    Ok(outcome)
}
