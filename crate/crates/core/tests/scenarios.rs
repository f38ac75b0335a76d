use std::fs;
use std::path::PathBuf;

use scalarlab::diagnostics::{balance_residuals, IDENTITY_NAMES};
use scalarlab::models::{weak_form_residual, TestFunction, TimeProfile, TrigTerm};
use scalarlab::scenarios::{
    cmd_run, cmd_sweep, cmd_verify, execute, read_snapshot, ExitStatus, RunConfig, CSV_HEADER, INCOMPLETE_MARKER,
};
use scalarlab::{run, Error, ModelParams, SpectralField, StepperConfig, TorusGrid};

fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

const SMALL: &str = r#"{
  "grid": { "sizes": [64] },
  "model": { "equation": "one_d", "delta": 1.0, "epsilon": 0.01 },
  "stepper": { "dt": 1e-3, "t_end": 0.1, "snapshot_stride": 5, "field_stride": 2 },
  "initial": { "shape": { "kind": "cosine", "c": 1.0, "a": 0.5, "k": 1 } },
  "checks": [
    { "check": "balance", "identity": "entropy", "max_rel": 1e-6 },
    { "check": "mass", "tol": 1e-12 },
    { "check": "min_floor", "slack": 1e-8 }
  ]
}"#;

#[test]
fn demo_configs_parse() {
    let mut n = 0;
    for entry in fs::read_dir(demo_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 6);
}

#[test]
fn unknown_keys_are_rejected() {
    let bad = SMALL.replace("\"t_end\"", "\"t_stop\": 1.0, \"t_end\"");
    assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
    let bad = SMALL.replace("\"delta\"", "\"dleta\": 0.0, \"delta\"");
    assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
    let bad = SMALL.replace("\"one_d\"", "\"n_dim\"");
    assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
}

#[test]
fn run_writes_artifacts_deterministically() {
    let cfg = RunConfig::from_json(SMALL).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let out = cmd_run(&cfg, a.path()).unwrap();
    cmd_run(&cfg, b.path()).unwrap();
    assert_eq!(out.status, ExitStatus::Pass, "{:?}", out.checks);

    let csv_a = fs::read(a.path().join("diagnostics.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.path().join("diagnostics.csv")).unwrap());
    let text = String::from_utf8(csv_a).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header, CSV_HEADER.to_vec());
    assert_eq!(text.lines().count(), 1 + out.trajectory.records.len());

    assert!(!a.path().join(INCOMPLETE_MARKER).exists());
    let report: serde_json::Value = serde_json::from_slice(&fs::read(a.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["exit_code"], 0);
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(a.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["steps"], 100);

    let snaps = &out.trajectory.snapshots;
    let last = snaps.len() - 1;
    let values = read_snapshot(&a.path().join(format!("snapshots/snap_{last:06}.f64"))).unwrap();
    assert_eq!(values, snaps[last].field.values());
}

#[test]
fn failed_check_maps_to_status_2() {
    // The δ = 1/2 model does not conserve mass.
    let cfg = SMALL.replace("\"delta\": 1.0", "\"delta\": 0.5, \"nu\": 1.0");
    let out = execute(&RunConfig::from_json(&cfg).unwrap()).unwrap();
    assert_eq!(out.status, ExitStatus::CheckFailed);
    assert_eq!(out.status.code(), 2);
    assert!(out.checks.iter().any(|c| c.name.contains("mass") && !c.passed));
}

#[test]
fn resolution_loss_maps_to_status_3() {
    let cfg = RunConfig::load(&demo_dir().join("blowup_exploration.json")).unwrap();
    let out = execute(&cfg).unwrap();
    assert_eq!(out.status, ExitStatus::BlowUp);
    assert_eq!(out.status.code(), 3);
}

#[test]
fn constant_data_is_stationary() {
    let g = TorusGrid::new(&[32]).unwrap();
    let th = SpectralField::constant(&g, 1.5);
    let p = ModelParams::dqg_1d(1.0, 1.0, 0.5, 0.01);
    let tr = run(&th, &p, &StepperConfig::fixed(1e-2, 0.5), &mut []).unwrap();
    assert!(tr.last_field().values().iter().all(|v| (v - 1.5).abs() < 1e-14));
    let rep = balance_residuals(&tr);
    assert_eq!(rep.identities.len(), IDENTITY_NAMES.len());
    for id in rep.identities.iter().filter(|r| r.applicable) {
        assert!(id.max_abs < 1e-12, "{}: {}", id.name, id.max_abs);
    }

    let tests = vec![
        TestFunction {
            spatial: vec![TrigTerm {
                k: vec![2],
                cos: 1.0,
                sin: 0.3,
            }],
            temporal: TimeProfile::quartic(0.5),
        },
        // ψ ≡ 0
        TestFunction {
            spatial: vec![TrigTerm {
                k: vec![1],
                cos: 0.0,
                sin: 0.0,
            }],
            temporal: TimeProfile::quartic(0.5),
        },
    ];
    let r = weak_form_residual(&tr, &p, &tests).unwrap();
    assert!(r.iter().all(|v| v.abs() < 1e-12), "{r:?}");
}

#[test]
fn epsilon_terms_scale_linearly() {
    let g = TorusGrid::new(&[128]).unwrap();
    let th = SpectralField::from_fn(&g, |x| 1.0 + 0.5 * x[0].cos()).unwrap();
    let contrib: Vec<f64> = [1e-3, 1e-4]
        .iter()
        .map(|&e| {
            let tr = run(&th, &ModelParams::qg_1d(e), &StepperConfig::fixed(1e-3, 0.2), &mut []).unwrap();
            balance_residuals(&tr).get("entropy").unwrap().eps_contribution
        })
        .collect();
    let ratio = contrib[0] / contrib[1];
    assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");
}

#[test]
fn halving_dt_shrinks_weak_residual() {
    let g = TorusGrid::new(&[64]).unwrap();
    let th = SpectralField::from_fn(&g, |x| 1.0 + 0.5 * x[0].cos()).unwrap();
    let p = ModelParams::qg_1d(1e-2);
    let tests = scalarlab::scenarios::default_weak_tests(1, 0.5);
    let worst = |dt: f64, stride: usize| {
        let tr = run(&th, &p, &StepperConfig::fixed(dt, 0.5).with_stride(stride), &mut []).unwrap();
        weak_form_residual(&tr, &p, &tests)
            .unwrap()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let (coarse, fine) = (worst(2e-3, 5), worst(1e-3, 5));
    assert!(coarse / fine >= 8.0, "{coarse:e} -> {fine:e}");
}

#[test]
fn sweep_reports_cauchy_distances() {
    let text = SMALL.replace(
        "\"checks\"",
        "\"outputs\": { \"formats\": [\"csv\"] }, \"sweep\": { \"epsilon\": [0.02, 0.01, 0.005] }, \"checks\"",
    );
    let cfg = RunConfig::from_json(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let rep = cmd_sweep(&cfg, dir.path(), 2).unwrap();
    assert_eq!(rep.rows.len(), 3);
    assert_eq!(rep.cauchy.len(), 2);
    assert_eq!(rep.cauchy_strictly_decreasing, Some(true));
    for f in ["summary.csv", "cauchy.csv", "sweep_report.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let serial = cmd_sweep(&cfg, tempfile::tempdir().unwrap().path(), 1).unwrap();
    assert_eq!(serial.cauchy, rep.cauchy);
}

#[test]
fn verify_suite_passes() {
    let rep = cmd_verify().unwrap();
    assert!(rep.passed);
    let minus = rep.rows.iter().find(|r| r.informational).unwrap();
    assert!(!minus.passed);
}
