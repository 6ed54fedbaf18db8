use std::fs;
use std::process::{Command, Output};

fn lowit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowit")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn reproduce_writes_csv_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig");
    let o = lowit(&["reproduce", "--figure", "noise-sweep", "--out", out.to_str().unwrap(), "--svg", "--points", "31"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("noise-sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("lo_photons,noise_db_coherent,noise_db_squeezed"));
    assert_eq!(csv.lines().count(), 1 + 32);
    assert!(csv.contains("-inf"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("noise-sweep.json")).unwrap()).unwrap();
    assert_eq!(json["squeezed_minimum"], "-inf");
    assert!(fs::read_to_string(out.join("noise-sweep.svg")).unwrap().contains("<svg"));
}

#[test]
fn fluctuations_has_361_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = lowit(&["reproduce", "--figure", "fluctuations", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("fluctuations.csv")).unwrap();
    assert_eq!(csv.lines().count(), 362);
    assert!(!dir.path().join("fluctuations.svg").exists());
}

#[test]
fn unknown_figure_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = lowit(&["reproduce", "--figure", "fig4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown figure"));
}

#[test]
fn unwritable_output_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = lowit(&["reproduce", "--figure", "robustness", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot write"));
}

#[test]
fn witness_report_and_warning() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.csv");
    fs::write(&input, "theta_rad,var_L,nb,comment\n1.5708,0.0620,0.1241,sq\n0,0.1241,0.1241,vac\n").unwrap();
    let out = dir.path().join("r.json");
    let o = lowit(&["witness", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: ignoring extra column \"comment\""));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"][0]["verdict"], "nonclassical_SI");
    assert_eq!(v["rows"][1]["verdict"], "classical_consistent");
    assert_eq!(v["summary"]["nonclassical_SI"], 1);
    assert!(v["rows"][0].get("full_no").is_none());
    assert!(v["rows"][0].get("comment").is_none());
}

#[test]
fn witness_bad_calibration_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.csv");
    fs::write(&input, "theta_rad,var_L,nb\n0,0.1,0.1\n0,0.1,0\n").unwrap();
    let out = dir.path().join("r.json");
    let o = lowit(&["witness", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"));
    assert!(!out.exists());
}

#[test]
fn witness_rejects_negative_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.csv");
    fs::write(&input, "theta_rad,var_L,nb\n0,0.1,0.1\n").unwrap();
    let o = lowit(&[
        "witness",
        "--input",
        input.to_str().unwrap(),
        "--tol=-1",
        "--out",
        dir.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_zero_trials_warns_and_passes() {
    let o = lowit(&["validate", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn validate_small_run_passes() {
    let o = lowit(&["validate", "--trials", "8", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["gaussian_fock_agreement", "classicality", "channel_laws", "reorder_matrix"]);
}

#[test]
fn validate_tiny_cutoff_fails_with_status_one() {
    let o = lowit(&["validate", "--trials", "5", "--cutoff-max", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL gaussian_fock_agreement"));
    assert!(stderr(&o).contains("no convergence"));
}

#[test]
fn validate_rejects_cutoff_below_two() {
    let o = lowit(&["validate", "--cutoff-max", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
