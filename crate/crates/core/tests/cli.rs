use std::process::{Command, Output};

use heatbind::principal::{flow_curves, solve_two_body, torus_modes};
use heatbind::renorm::RenormScheme;
use heatbind::ManifoldSpec;

fn heatbind(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatbind")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_record(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON record")
}

#[test]
fn twobody_plane() {
    let out = heatbind(&["twobody", "--manifold", "plane", "--mu2", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert!((v["result"]["E_gr"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    for key in ["E_gr", "bracket_lo", "bracket_hi", "residual", "iterations"] {
        assert!(v["result"].get(key).is_some(), "{key}");
    }
}

#[test]
fn validation_errors_exit_one() {
    let out = heatbind(&["twobody", "--manifold", "plane"]);
    assert_eq!(out.status.code(), Some(1));
    let rec = stderr_record(&out);
    assert_eq!(rec["kind"], "config");
    assert!(rec["message"].as_str().unwrap().contains("scheme"));

    let out = heatbind(&["twobody", "--manifold", "plane", "--bogus", "3"]);
    assert_eq!(out.status.code(), Some(1));

    let out = heatbind(&["rg", "--lambda", "1", "--gamma", "1e-8"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_record(&out)["kind"], "landau_pole");
}

#[test]
fn numerical_failure_exits_two() {
    // The torus bound state lies far outside a window of ±50% around μ².
    let out = heatbind(&["twobody", "--manifold", "torus", "--length", "1", "--mu2", "1", "--window", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_record(&out)["kind"], "no_sign_change");
}

#[test]
fn flow_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flow.csv");
    let out = heatbind(&[
        "flow", "--manifold", "torus", "--length", "1", "--mu2", "1", "--emin", "-10", "--emax", "-0.1", "--points", "40", "--modes", "3",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("E,omega,domega_dE,mode"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 120);

    let grid: Vec<f64> = (0..40).map(|i| -10.0 + 9.9 * i as f64 / 39.0).collect();
    let curves = flow_curves(&ManifoldSpec::Torus { length: 1.0 }, &RenormScheme::BoundState { mu2: 1.0 }, &grid, &torus_modes(3)).unwrap();
    let expected = curves.iter().flat_map(|c| c.samples.iter().map(move |s| (c.mode.label(), *s)));
    for (row, (label, s)) in rows.iter().zip(expected) {
        let parsed: Vec<f64> = row[..3].iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(parsed[0].to_bits(), s.e.to_bits());
        assert_eq!(parsed[1].to_bits(), s.omega.to_bits());
        assert_eq!(parsed[2].to_bits(), s.domega_de.to_bits());
        assert_eq!(row[3], label);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["flow", "--manifold", "sphere", "--radius", "1", "--mu2", "2", "--points", "30"];
    let a = heatbind(&args);
    let b = heatbind(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let one = Command::new(env!("CARGO_BIN_EXE_heatbind")).args(args).env("HEATBIND_THREADS", "1").output().unwrap();
    assert_eq!(one.stdout, a.stdout);
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_heatbind"))
        .args(["onedim"])
        .env("HEATBIND_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"manifold": "torus", "length": 2.0, "mu2": 1.0}"#).unwrap();
    let out = heatbind(&["twobody", "--config", path.to_str().unwrap(), "--mu2", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let want = solve_two_body(&ManifoldSpec::Torus { length: 2.0 }, &RenormScheme::BoundState { mu2: 3.0 }).unwrap().e_gr;
    assert_eq!(json(&out)["result"]["E_gr"].as_f64().unwrap(), want);

    std::fs::write(&path, r#"{"manifold": "torus", "lenght": 2.0}"#).unwrap();
    let out = heatbind(&["twobody", "--config", path.to_str().unwrap(), "--mu2", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn onedim_table() {
    let out = heatbind(&["onedim", "--n", "2,3", "--lambda", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,exact,hartree,meanfield,hartree_gap,meanfield_gap"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "2");
    assert_eq!(row[1].parse::<f64>().unwrap(), -0.125);
}

#[test]
fn rg_example() {
    let out = heatbind(&["rg", "--lambda", "12.566370", "--gamma", "2.718282"]);
    assert!(out.status.success());
    let flowed = json(&out)["result"]["flowed"].as_f64().unwrap();
    assert!((flowed - 2.0 * std::f64::consts::PI).abs() < 1e-5);
}

#[test]
fn spectrum_dump() {
    let out = heatbind(&["heat", "--manifold", "sphere", "--radius", "1", "--spectrum-cutoff", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("sigma,degeneracy"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn meanfield_profile_residual() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u0.csv");
    let (w, dr) = (0.5f64, 0.005);
    let mut csv = String::from("r,u0\n");
    for i in 0..1200 {
        let r = i as f64 * dr;
        csv.push_str(&format!("{r},{}\n", (-r * r / (2.0 * w * w)).exp() / (std::f64::consts::PI.sqrt() * w)));
    }
    std::fs::write(&path, csv).unwrap();
    let out = heatbind(&["meanfield2d", "--mu2", "1", "--n", "20", "--profile", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["result"]["crossing_energy"].as_f64().unwrap() < -1.0);
}
