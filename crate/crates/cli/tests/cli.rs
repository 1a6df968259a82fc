use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn soler(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soler"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn groundstate_reports_sech_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let out = soler(
        dir.path(),
        &["groundstate", "--n", "1", "--k", "1", "--m", "1"],
    );
    assert_eq!(out.status.code(), Some(0));
    let summary = stdout_json(&out);
    assert_eq!(summary["schema_version"], "1.0");
    assert!((summary["u0"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let table = std::fs::read_to_string(dir.path().join("groundstate.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("r,u,du"));
    assert_eq!(lines.count(), 3001);
}

#[test]
fn groundstate_names_the_exponent_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let out = soler(
        dir.path(),
        &["groundstate", "--n", "3", "--k", "2", "--m", "1"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k < 2/(n-2)"));
}

#[test]
fn unwritable_output_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing/gs.csv");
    let out = soler(
        dir.path(),
        &["groundstate", "--output", target.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!target.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn branch_round_trips_through_charge_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = soler(
        dir.path(),
        &[
            "branch",
            "--n",
            "1",
            "--k",
            "1",
            "--dump-profiles",
            "profiles",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc = read_json(&dir.path().join("branch.json"));
    assert_eq!(doc["truncated"], false);
    let points = doc["points"].as_array().unwrap();
    assert_eq!(points.len(), 20);
    let q: Vec<f64> = points.iter().map(|p| p["Q"].as_f64().unwrap()).collect();
    assert!(q.windows(2).all(|w| w[1] < w[0]));
    assert!(points
        .iter()
        .all(|p| p["positivity_pass"] == true && p["cone_pass"] == true));
    let profile = std::fs::read_to_string(dir.path().join("profiles/profile_019.csv")).unwrap();
    assert!(profile.starts_with("t,V,U,Vhat,Uhat,tildeV,tildeU\n"));

    let out = soler(dir.path(), &["charge-curve", "branch.json"]);
    assert_eq!(out.status.code(), Some(0));
    let verdict = &stdout_json(&out)["verdict"];
    assert_eq!(verdict["regime"], "subcritical");
    assert_eq!(verdict["expected_sign"], "negative");
    assert_eq!(verdict["measured_sign"], "negative");
    let curve = std::fs::read_to_string(dir.path().join("charge_curve.csv")).unwrap();
    assert!(curve.starts_with("omega,Q,dQ_domega\n"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "branch",
        "--eps-max",
        "0.05",
        "--eps-min",
        "0.02",
        "--steps",
        "4",
    ];
    soler(dir.path(), &[&args[..], &["--output", "a.json"]].concat());
    soler(dir.path(), &[&args[..], &["--output", "b.json"]].concat());
    let a = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.json")).unwrap();
    assert_eq!(a.replace("a.json", ""), b.replace("b.json", ""));
}

#[test]
fn inverted_schedule_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = soler(
        dir.path(),
        &["branch", "--eps-max", "0.01", "--eps-min", "0.05"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps_min"));
}

#[test]
fn positivity_loss_truncates_the_branch() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "branch",
        "--n",
        "1",
        "--k",
        "0.5",
        "--eps-max",
        "0.9",
        "--eps-min",
        "0.3",
        "--steps",
        "5",
    ];
    let out = soler(dir.path(), &args);
    assert_eq!(out.status.code(), Some(1));
    let doc = read_json(&dir.path().join("branch.json"));
    assert_eq!(doc["truncated"], true);
    assert_eq!(doc["failure"]["eps"], 0.9);
    assert!(doc["failure"]["reason"]
        .as_str()
        .unwrap()
        .contains("positivity"));
}

#[test]
fn charge_curve_needs_three_points_and_a_known_schema() {
    let dir = tempfile::tempdir().unwrap();
    soler(
        dir.path(),
        &[
            "branch",
            "--eps-max",
            "0.05",
            "--eps-min",
            "0.04",
            "--steps",
            "2",
        ],
    );
    let out = soler(dir.path(), &["charge-curve", "branch.json"]);
    assert_eq!(out.status.code(), Some(2));

    soler(
        dir.path(),
        &[
            "branch",
            "--eps-max",
            "0.05",
            "--eps-min",
            "0.03",
            "--steps",
            "3",
        ],
    );
    let path = dir.path().join("branch.json");
    let mut doc = read_json(&path);
    doc["schema_version"] = "2.0".into();
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = soler(dir.path(), &["charge-curve", "branch.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema_version"));

    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(
        soler(dir.path(), &["charge-curve", "branch.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"n": 3, "k": 2.0, "grid": {"t_max": 30.0, "n_points": 3001}}"#;
    std::fs::write(dir.path().join("run.json"), cfg).unwrap();
    let out = soler(dir.path(), &["groundstate", "--config", "run.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = soler(
        dir.path(),
        &[
            "groundstate",
            "--config",
            "run.json",
            "--k",
            "1",
            "--m",
            "0.5",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!((stdout_json(&out)["u0"].as_f64().unwrap() - 4.3373877).abs() < 1e-6);

    std::fs::write(dir.path().join("bad.json"), r#"{"n": 1, "mass": 1.0}"#).unwrap();
    let out = soler(dir.path(), &["groundstate", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mass"));
}

#[test]
fn verify_reports_and_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = soler(dir.path(), &["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("groundstate, dirac"));

    let out = soler(dir.path(), &["verify", "--suite", "charge", "--json"]);
    let report = stdout_json(&out);
    let ids: Vec<&str> = report["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["A8", "A9", "A12"]);
    let pass = report["pass"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if pass { 0 } else { 1 }));
}

#[test]
fn oracle_shoot_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = soler(dir.path(), &["oracle-shoot", "--eps", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = stdout_json(&out);
    assert!((summary["v0"].as_f64().unwrap() - 1.0).abs() < 1e-2);
    assert!((summary["charge"].as_f64().unwrap() / 0.1 - 1.0).abs() < 0.05);
    assert_eq!(
        soler(dir.path(), &["oracle-shoot", "--eps", "1.5"])
            .status
            .code(),
        Some(2)
    );
}
