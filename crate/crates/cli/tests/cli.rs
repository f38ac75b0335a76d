use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CONFIG: &str = r#"{
  "label": "cli smoke",
  "grid": { "sizes": [64] },
  "model": { "equation": "one_d", "delta": 1.0, "epsilon": 0.01 },
  "stepper": { "dt": 1e-3, "t_end": 0.05, "snapshot_stride": 5 },
  "initial": { "shape": { "kind": "cosine", "c": 1.0, "a": 0.5, "k": 1 } },
  "checks": [{ "check": "balance", "identity": "entropy", "max_rel": 1e-6 }]
}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_scalarlab"));
    c.env_remove("SCALARLAB_OUT");
    c
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

fn run_with(config: &Path, out: &Path) -> Output {
    bin()
        .arg("run")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn demo(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

#[test]
fn run_passes_and_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out = tmp.path().join("out");
    let o = run_with(&cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("PASS balance"), "{stdout}");
    for f in [
        "diagnostics.csv",
        "metadata.json",
        "report.json",
        "snapshots/snap_000000.f64",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn failed_check_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let text = CONFIG.replace("\"max_rel\": 1e-6", "\"max_rel\": 1e-30");
    let o = run_with(&write_config(tmp.path(), &text), &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL balance"));
}

#[test]
fn resolution_loss_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_with(&demo("blowup_exploration.json"), tmp.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_config_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let text = CONFIG.replace("\"label\"", "\"lable\"");
    let o = run_with(&write_config(tmp.path(), &text), &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8(o.stderr).unwrap().contains("lable"));

    let o = bin()
        .args(["run", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn unwritable_output_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let blocker = tmp.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let o = run_with(&cfg, &blocker.join("out"));
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let target = tmp.path().join("from-env");
    let o = bin()
        .args(["run", "--quiet", "--config"])
        .arg(&cfg)
        .env("SCALARLAB_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(target.join("diagnostics.csv").is_file());
}

#[test]
fn verify_reports_every_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin().arg("verify").arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("tricomi"), "{stdout}");
    let files: Vec<_> = fs::read_dir(tmp.path()).unwrap().collect();
    let json = fs::read(files[0].as_ref().unwrap().path()).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn oracle_table() {
    let o = bin()
        .args([
            "oracle",
            "--op",
            "lambda-pow",
            "--gamma",
            "1.5",
            "--images",
            "1000",
            "-n",
            "32",
            "--seeds",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!o.stdout.is_empty());
}
