use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nehari(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nehari")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn solve(dir: &TempDir, json: &str) -> (Output, std::path::PathBuf) {
    let cfg = write_config(dir.path(), "solve.json", json);
    let out = dir.path().join("solve");
    let o = nehari(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    (o, out)
}

fn sweep(dir: &TempDir, name: &str, json: &str) -> (Output, String) {
    let cfg = write_config(dir.path(), &format!("{name}.json"), json);
    let out = dir.path().join(name);
    let o = nehari(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap_or_default();
    (o, csv)
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

/// Rows of a sweep CSV as column-name → cell maps.
fn rows(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

#[test]
fn decoupled_solve_is_the_scalar_state() {
    let dir = TempDir::new().unwrap();
    let (o, out) = solve(&dir, r#"{"params": {"n": 1, "q": 2, "b": 0, "omega": 2}}"#);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["classification"], "trivial_v");
    assert!((r["m"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-6);
    assert_eq!(r["verification"]["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn strong_coupling_profile_file_layout() {
    let dir = TempDir::new().unwrap();
    let (o, out) = solve(&dir, r#"{"params": {"n": 1, "q": 2, "b": 3, "omega": 1}, "grid": {"r_max": 25, "num_points": 1024}}"#);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&out)["classification"], "nontrivial");
    let csv = fs::read_to_string(out.join("profile.csv")).unwrap();
    let meta: Vec<&str> = csv.lines().take_while(|l| l.starts_with('#')).collect();
    let keys: Vec<&str> = meta.iter().map(|l| l[2..].split(" = ").next().unwrap()).collect();
    assert_eq!(keys, ["n", "q", "b", "omega", "m", "tau_residual", "classification"]);
    let body: Vec<&str> = csv.lines().skip(meta.len()).collect();
    assert_eq!(body[0], "r,u,v");
    assert_eq!(body.len(), 1 + 1024);
    let last: Vec<f64> = body[1024].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last, vec![25.0, 0.0, 0.0]);
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let (o, _) = solve(&dir, "{ not json");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot parse"));
}

#[test]
fn inadmissible_parameters_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let (o, _) = solve(&dir, r#"{"params": {"n": 3, "q": 3, "b": 1, "omega": 1}}"#);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("q < n/(n-2)"));
}

#[test]
fn sweep_lattice_is_validated_up_front() {
    let dir = TempDir::new().unwrap();
    let (o, csv) = sweep(
        &dir,
        "bad",
        r#"{"params": {"n": 3, "q": 2, "b": 1, "omega": 1}, "sweep": {"variable": "q", "start": 1.5, "stop": 3.5, "count": 3}}"#,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(csv.is_empty());
}

#[test]
fn sweep_without_axis_is_a_configuration_error() {
    let dir = TempDir::new().unwrap();
    let (o, _) = sweep(&dir, "none", r#"{"params": {"n": 1, "q": 2, "b": 1, "omega": 1}}"#);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn coupling_sweep_flips_near_one() {
    let dir = TempDir::new().unwrap();
    let (o, csv) = sweep(
        &dir,
        "flip",
        r#"{"params": {"n": 1, "q": 2, "b": 0, "omega": 1}, "sweep": {"variable": "b", "start": 0, "stop": 2, "count": 21}}"#,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 21);
    let values: Vec<f64> = rows.iter().map(|r| r["value"].parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]), "rows in axis order");
    let first = rows.iter().position(|r| r["classification"] == "nontrivial").unwrap();
    assert!(rows[..first].iter().all(|r| r["classification"] != "nontrivial"));
    assert!(rows[first..].iter().all(|r| r["classification"] == "nontrivial"));
    assert!((values[first] - 1.0).abs() <= 0.1 + 1e-12, "flip at {}", values[first]);
    assert!(rows.iter().all(|r| r["status"] == "ok" && r["D"] != "n/a"));
}

#[test]
fn sublinear_frequency_sweep_is_nontrivial_throughout() {
    let dir = TempDir::new().unwrap();
    let (o, csv) = sweep(
        &dir,
        "omega",
        r#"{"params": {"n": 1, "q": 1.5, "b": 0.1, "omega": 1}, "sweep": {"variable": "omega", "start": 1, "stop": 5, "count": 5}}"#,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for r in rows(&csv) {
        assert_eq!(r["classification"], "nontrivial");
        assert_eq!(r["D"], "n/a");
        let m: f64 = r["m"].parse().unwrap();
        let iu: f64 = r["I_u0"].parse().unwrap();
        assert!(m < iu);
    }
}

#[test]
fn single_point_sweep_matches_solve_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let json = r#"{"params": {"n": 2, "q": 2, "b": 1.5, "omega": 1.2}, "sweep": {"variable": "b", "start": 1.5, "stop": 9, "count": 1}}"#;
    let (o, csv) = sweep(&dir, "one", json);
    assert!(o.status.success());
    let (_, again) = sweep(&dir, "two", json);
    assert_eq!(csv, again, "bit-identical output");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 1);

    let (o, out) = solve(&dir, json);
    assert!(o.status.success());
    let r = report(&out);
    let m_sweep: f64 = rows[0]["m"].parse().unwrap();
    let m_solve = r["m"].as_f64().unwrap();
    assert!((m_sweep - m_solve).abs() <= 1e-10 * m_solve);
    assert_eq!(rows[0]["classification"], r["classification"].as_str().unwrap());
}

#[test]
fn thresholds_table_marks_out_of_scope_entries() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("th");
    let o = nehari(&["thresholds", "--q", "2,1.5", "--omega", "1,5,2", "--n", "1,2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let rows = rows(&fs::read_to_string(out.join("thresholds.csv")).unwrap());
    assert_eq!(rows.len(), 12);
    let find = |n: &str, q: &str, w: &str| rows.iter().find(|r| r["n"] == n && r["q"] == q && r["omega"] == w).unwrap();

    let unit = find("1", "2", "1");
    assert_eq!(unit["C"].parse::<f64>().unwrap(), 1.0);
    assert_eq!(unit["D"].parse::<f64>().unwrap(), 1.0);

    let five = find("1", "2", "5");
    let (c, d): (f64, f64) = (five["C"].parse().unwrap(), five["D"].parse().unwrap());
    assert!((c - 101.4).abs() < 1e-9 && (d - 37.4).abs() < 1e-9 && d < c);

    let sub = find("2", "1.5", "2");
    assert_eq!(sub["D"], "n/a");
    assert_eq!(sub["b_opt"].parse::<f64>().unwrap(), 0.0);
    assert!(sub["notes"].contains("any b > 0 suffices"));

    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().next().unwrap().starts_with("n  q"));
}

#[test]
fn verify_on_a_coarse_grid_fails() {
    let o = nehari(&["verify", "--num-points", "64"]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().any(|l| l.starts_with("FAIL C1")));
}

#[test]
fn malformed_flags_exit_with_two() {
    assert_eq!(nehari(&["verify", "--level", "medium"]).status.code(), Some(2));
    assert_eq!(nehari(&["solve"]).status.code(), Some(2));
}
