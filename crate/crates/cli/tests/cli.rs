use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn landau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_landau")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn gp(dir: &Path, j: u32) -> String {
    write(dir, &format!("gp{j}.json"), &format!(r#"{{"kind": {{"generalized_poisson": {j}}}}}"#)).display().to_string()
}

fn columns(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines();
    let head = lines.next().unwrap().split(',').map(str::to_owned).collect();
    (head, lines.map(|l| l.split(',').map(str::to_owned).collect()).collect())
}

#[test]
fn gp1_damping_rate_equals_r() {
    let dir = TempDir::new().unwrap();
    let eq = gp(dir.path(), 1);
    let out = landau(&["--equilibrium", &eq, "dispersion", "--r-grid", "0.01:0.3:30"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = columns(&String::from_utf8(out.stdout).unwrap());
    let r = head.iter().position(|h| h == "r").unwrap();
    let w2 = head.iter().position(|h| h == "omega2").unwrap();
    assert_eq!(rows.len(), 30);
    for row in rows {
        let (r, w2): (f64, f64) = (row[r].parse().unwrap(), row[w2].parse().unwrap());
        assert!((w2 - r).abs() < 1e-10, "r {r} omega2 {w2}");
    }
}

#[test]
fn nonpositive_xi_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let eq = gp(dir.path(), 2);
    let out = landau(&["--equilibrium", &eq, "poles", "--j", "2", "--xi-grid", "0:0:1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("xi"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let eq = gp(dir.path(), 1);
    assert_eq!(landau(&["nonsense"]).status.code(), Some(1));
    assert_eq!(landau(&["--equilibrium", &eq, "dispersion", "--r-grid", "0.3:0.1:4"]).status.code(), Some(1));
    assert_eq!(landau(&["--equilibrium", "/nonexistent.json", "penrose"]).status.code(), Some(1));
    let bad = write(dir.path(), "bad.json", r#"{"kind": "unknown"}"#);
    assert_eq!(landau(&["--equilibrium", bad.to_str().unwrap(), "penrose"]).status.code(), Some(1));
}

#[test]
fn validate_passes_for_gp1() {
    let dir = TempDir::new().unwrap();
    let eq = gp(dir.path(), 1);
    let out = landau(&["--equilibrium", &eq, "validate"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let (head, rows) = columns(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(head, ["suite", "check", "status", "detail"]);
    let suites: std::collections::BTreeSet<_> = rows.iter().map(|r| r[0].clone()).collect();
    for s in ["equilibrium", "dispersion_function", "penrose", "dispersion_relation", "greens_function", "volterra"] {
        assert!(suites.contains(s), "missing suite {s}");
    }
    assert!(rows.iter().all(|r| r[2] == "pass"));
}

#[test]
fn envelope_violation_exits_two() {
    let dir = TempDir::new().unwrap();
    let eq = gp(dir.path(), 2);
    let args = ["--equilibrium", &eq, "greens", "--xi", "1", "--tau-grid", "1:5:5", "--method", "high", "--envelope-constant", "1e-12"];
    assert_eq!(landau(&args).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let eq = gp(dir.path(), 2);
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = landau(&[
            "--equilibrium", &eq, "--output", path.to_str().unwrap(), "--threads", threads,
            "greens", "--xi-grid", "0.5:2:4", "--tau-grid", "0:10:6",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "1"));
    assert_eq!(a, run("c.csv", "4"));
}

#[test]
fn csv_floats_round_trip() {
    let dir = TempDir::new().unwrap();
    let eq = gp(dir.path(), 3);
    let out = landau(&["--equilibrium", &eq, "dispersion", "--r-grid", "0.01:0.05:3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let (_, rows) = columns(&text);
    for cell in rows.iter().flatten() {
        let v: f64 = cell.parse().unwrap();
        assert_eq!(format!("{}", v).parse::<f64>().unwrap(), v);
        assert!(cell.len() < 30, "{cell}");
    }
}

#[test]
fn json_format_and_volterra() {
    let dir = TempDir::new().unwrap();
    let eq = gp(dir.path(), 1);
    let forcing = write(
        dir.path(),
        "forcing.json",
        r#"{"kind": "free_streaming", "g": {"kind": "gaussian", "amplitude": 1, "width": 1}, "q": {"kind": "gaussian", "width": 1}}"#,
    );
    let out = landau(&[
        "--equilibrium", &eq, "--format", "json", "volterra", "--xi", "0.5", "--forcing",
        forcing.to_str().unwrap(), "--t-max", "10", "--steps", "100",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0]["t"], 0.0);
    assert_eq!(rows[0]["re_rho"], rows[0]["re_h"]);
    assert_eq!(rows[100]["t"], 10.0);
}

#[test]
fn penrose_reports_no_winding() {
    let dir = TempDir::new().unwrap();
    let eq = gp(dir.path(), 2);
    let out = landau(&["--equilibrium", &eq, "--format", "json", "penrose", "--probes", "0.1,1,5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["winding"] == 0), "{v}");
}
