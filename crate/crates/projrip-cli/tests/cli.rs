//! End-to-end checks of the command-line interface: exit codes, output
//! formats, and seed-for-seed reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn projrip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projrip"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn verify_geometry_passes_and_reports() {
    let out = projrip(&["verify-geometry", "--n", "4", "--s", "2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("tangent_dim=4"));
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_geometry_includes_circle_for_n2() {
    let out = projrip(&["verify-geometry", "--n", "2", "--s", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0.7071067812"));
}

#[test]
fn verify_geometry_rejects_improper_subspace() {
    let out = projrip(&["verify-geometry", "--n", "3", "--s", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
}

#[test]
fn reach_reports_witness_and_probe() {
    let out = projrip(&["reach", "--n", "4", "--s", "2", "--trials", "20", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("0.7071067811"));
    assert!(text.contains("probe minimum"));
}

#[test]
fn reach_rejects_large_ambient() {
    let out = projrip(&["reach", "--n", "9", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rip_rejects_too_many_measurements() {
    let out = projrip(&["rip", "--n", "3", "--s", "1", "--m", "9", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rip_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = projrip(&[
        "rip", "--n", "8", "--s", "2", "--m", "48", "--trials", "100", "--seed", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("eps_hat"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["artifact"]["name"], "projrip");
    assert_eq!(report["config"]["seed"], 3);
    assert_eq!(report["result"]["trials"], 100);
    let mean = report["result"]["ratio_mean"].as_f64().unwrap();
    assert!(mean > 0.8 && mean < 1.2);
    assert_eq!(report["result"]["ratios"].as_array().unwrap().len(), 100);
}

#[test]
fn rip_csv_has_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = projrip(&[
        "rip", "--n", "6", "--s", "1", "--m", "12", "--trials", "25", "--seed", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# artifact=projrip"));
    assert!(text.contains("subcommand=rip") && text.contains("seed=2"), "config line embedded");
    assert!(text.contains("trial,ratio\n"));
    let data_rows = text.lines().filter(|l| !l.starts_with('#') && !l.contains("trial")).count();
    assert_eq!(data_rows, 25);
}

#[test]
fn scaling_writes_fit_and_points() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fit.csv");
    let out = projrip(&[
        "scaling", "--grid", "4:1,4:2,6:2", "--eps", "0.7", "--trials", "60", "--seed", "5",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("r^2"));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# slope="));
    assert!(text.contains("n,s,eps,x,m_min"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4); // header + 3 points
}

#[test]
fn scaling_rejects_malformed_grid() {
    let out = projrip(&["scaling", "--grid", "4x1", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scaling_reports_unsatisfiable_as_failure() {
    // At N=2 only m <= 3 exists; a 0.1% deviation target is hopeless.
    let out = projrip(&["scaling", "--grid", "2:1", "--eps", "0.001", "--trials", "50"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsatisfiable"));
}

#[test]
fn covering_prints_estimate() {
    let out = projrip(&[
        "covering", "--n", "2", "--s", "1", "--t", "0.4", "--samples", "5000", "--seed", "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("packing count = "));
}

fn assert_reproducible(args: &[&str], file: &Path) {
    let first = projrip(args);
    assert_eq!(first.status.code(), Some(0), "first run failed");
    let bytes_a = std::fs::read(file).unwrap();
    let second = projrip(args);
    assert_eq!(second.status.code(), Some(0), "second run failed");
    let bytes_b = std::fs::read(file).unwrap();
    assert_eq!(bytes_a, bytes_b, "same command line and seed must be byte-identical");
}

#[test]
fn outputs_are_byte_identical_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let rip_json = dir.path().join("a.json");
    assert_reproducible(
        &[
            "rip", "--n", "6", "--s", "2", "--m", "20", "--trials", "200", "--seed", "11",
            "--out", rip_json.to_str().unwrap(),
        ],
        &rip_json,
    );

    let covering_csv = dir.path().join("c.csv");
    assert_reproducible(
        &[
            "covering", "--n", "3", "--s", "1", "--t", "0.3", "--samples", "4000", "--seed",
            "13", "--out", covering_csv.to_str().unwrap(), "--format", "csv",
        ],
        &covering_csv,
    );

    // a different seed must change the contents
    let other = dir.path().join("b.json");
    let out = projrip(&[
        "rip", "--n", "6", "--s", "2", "--m", "20", "--trials", "200", "--seed", "12", "--out",
        other.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(std::fs::read(&rip_json).unwrap(), std::fs::read(&other).unwrap());
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let run = |threads: &str, path: &Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_projrip"))
            .env("PROJRIP_THREADS", threads)
            .args([
                "rip", "--n", "6", "--s", "2", "--m", "16", "--trials", "300", "--seed", "21",
                "--out", path.to_str().unwrap(),
            ])
            .output()
            .expect("binary runs");
        assert_eq!(out.status.code(), Some(0));
    };
    run("1", &a);
    run("2", &b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
