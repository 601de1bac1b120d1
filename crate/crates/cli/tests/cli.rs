//! End-to-end tests of the `volterra` binary: flag handling, config-file
//! merging, CSV artifacts, and exit codes.

use std::fs;
use std::process::Command;

fn volterra() -> Command {
    Command::new(env!("CARGO_BIN_EXE_volterra"))
}

#[test]
fn solve_constant_kernel_m1_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.csv");
    let status = volterra()
        .args(["solve", "--kernel", "1", "--m", "1", "--X", "1", "--N", "8", "--richardson"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(&out).unwrap();
    let mut rows = 0;
    for line in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let x: f64 = cols[1].parse().unwrap();
        let y: f64 = cols[2].parse().unwrap();
        let u: f64 = cols[3].parse().unwrap();
        assert!((y - x / 2.0).abs() <= 1e-14, "{line}");
        assert!((u - y * y).abs() <= 1e-16);
        rows += 1;
    }
    assert_eq!(rows, 9);
    // comma-separated scientific notation with a '.' decimal point
    assert!(csv.contains("5.000000000000e-1"));
}

#[test]
fn solve_expression_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.csv");
    let status = volterra()
        .args(["solve", "--kernel", "exp(x-t)", "--m", "2", "--X", "0.5", "--N", "16"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(fs::read_to_string(&out).unwrap().starts_with("# kernel=exp(x-t)\n"));
}

#[test]
fn invalid_kernel_expressions_fail() {
    // syntax error
    let out = volterra()
        .args(["solve", "--kernel", "1 + y", "--m", "1", "--X", "1", "--N", "4"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("position"));
    // parses, but takes nonpositive values on the triangle
    let out = volterra()
        .args(["solve", "--kernel", "x - t - 1", "--m", "1", "--X", "1", "--N", "4"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    let out = dir.path().join("sol.csv");
    fs::write(
        &config,
        format!(
            "# run configuration\nkernel = 1\nm = 2\nX = 1\nN = 4\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    // config alone supplies everything
    let status = volterra()
        .args(["solve", "--config"])
        .arg(&config)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(fs::read_to_string(&out).unwrap().contains("# m=2.000000000000e0"));
    // a flag overrides the config value for the same key
    let status = volterra()
        .args(["solve", "--m", "3", "--config"])
        .arg(&config)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(fs::read_to_string(&out).unwrap().contains("# m=3.000000000000e0"));
}

#[test]
fn converge_writes_report_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let status = volterra()
        .args(["converge", "--example", "1", "--m", "2"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.contains("h,N,error,log10_h,log10_error"));
    assert!(csv.contains("# fitted_order="));
    assert!(csv.contains("# theoretical_order="));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 13);
}

#[test]
fn verify_suites_pass_and_reject_unknown() {
    let out = volterra().args(["verify", "--suite", "recurrence"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
    assert!(!volterra().args(["verify", "--suite", "nope"]).status().unwrap().success());
}

#[test]
fn missing_required_parameter_is_reported() {
    let out = volterra()
        .args(["solve", "--kernel", "1", "--m", "1", "--X", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--N"));
}
