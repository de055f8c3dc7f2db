//! End-to-end runs of the `tqsl` binary.

use std::fs;
use std::process::Command;

fn tqsl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tqsl"))
}

#[test]
fn gue_subcommand_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let status = tqsl()
        .args(["gue", "--dim", "3", "--tmax", "1.5", "--steps", "40", "--seeds", "0-1,7"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for seed in [0, 1, 7] {
        let csv = fs::read_to_string(dir.path().join(format!("gue_seed{seed:04}.csv"))).unwrap();
        assert!(csv.starts_with("t,tau_mt,tau_tqsl,delta,quad_error,validity\n"));
        assert_eq!(csv.lines().count(), 41);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let runs = summary["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    assert_eq!(runs[2]["seed"], 7);
    assert!(runs[0]["min_delta"].as_f64().unwrap() >= -1e-9);
    assert_eq!(summary["config"]["steps"], 40);
}

#[test]
fn gue_rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let status = tqsl()
            .args(["gue", "--steps", "50", "--seeds", "3", "--basis", "identity", "--out"])
            .arg(d.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let name = "gue_seed0003.csv";
    assert_eq!(
        fs::read(a.path().join(name)).unwrap(),
        fs::read(b.path().join(name)).unwrap()
    );
}

#[test]
fn spin_subcommand_with_optimized_basis() {
    let dir = tempfile::tempdir().unwrap();
    let status = tqsl()
        .args(["spin", "--steps", "60", "--basis", "optimize", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["max_fidelity_deviation"].as_f64().unwrap() <= 1e-10);
    assert!(summary["run"]["basis_id"].as_str().unwrap().starts_with("optimized"));
}

#[test]
fn verify_subcommand_reports_properties() {
    let dir = tempfile::tempdir().unwrap();
    let status = tqsl()
        .args(["verify", "--dim", "4", "--trials", "20", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("properties.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let names: Vec<&str> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"uncertainty-chain-mixed"));
    assert!(names.contains(&"non-hermitian-rejection"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "dim = 2\nt_max = 1.0\nsteps = 30\nseeds = [5]\nbasis_mode = \"identity\"\n").unwrap();
    let out = dir.path().join("out");
    let status = tqsl()
        .arg("gue")
        .arg("--config")
        .arg(&cfg)
        .args(["--steps", "20", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = fs::read_to_string(out.join("gue_seed0005.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        tqsl()
            .args(args)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run(&["gue", "--steps", "1"]), Some(2));
    assert_eq!(run(&["gue", "--tmax", "-1"]), Some(2));
    assert_eq!(run(&["gue", "--seeds", "9-2"]), Some(2));
    assert_eq!(run(&["spin", "--blocks", "1,3"]), Some(2));
    assert_eq!(run(&["gue", "--state", "{\"re\":[1,0],\"im\":[0,0]}"]), Some(2));
}
