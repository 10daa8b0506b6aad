use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bcklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcklab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn without_runtime(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("runtime_ms");
    v
}

const FREE: &str = r#"{
  "potential": {"kind": "free"},
  "gamma": 0.5,
  "initial": {"t": 0, "q": 0, "qdot": 1},
  "t_end": 2,
  "checks": {"integrals": ["I1", "I2"], "symmetries": ["X1", "Dt", "qDq"], "weak_constant": true}
}"#;

#[test]
fn free_particle_scenario_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "free.json", FREE);
    let out = tmp.path().join("out");
    let o = bcklab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let csv = fs::read_to_string(out.join("trajectory_0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,q,qdot,action,I1,I2");
    assert_eq!(csv.lines().count(), 2001 + 1);

    let s = json(&out.join("summary.json"));
    for key in ["version", "scenario", "checks", "runtime_ms"] {
        assert!(s.get(key).is_some(), "missing {key}");
    }
    assert_eq!(s["pass"], true);
    let checks = s["checks"].as_array().unwrap();
    assert!(checks.len() >= 7);
    for c in checks {
        for key in ["name", "metric", "tolerance", "pass"] {
            assert!(c.get(key).is_some());
        }
    }
}

#[test]
fn summaries_repeat_exactly() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "free.json", FREE);
    let runs: Vec<Value> = ["a", "b"]
        .iter()
        .map(|d| {
            let out = tmp.path().join(d);
            bcklab(&[
                "simulate",
                "--config",
                &cfg,
                "--out",
                out.to_str().unwrap(),
                "--seed",
                "7",
            ]);
            without_runtime(json(&out.join("summary.json")))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0]["scenario"]["seed"], 7);
}

#[test]
fn integral_bound_to_another_potential_is_a_schema_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"{"potential": {"kind": "quadratic", "A": 1.0}, "gamma": 0.5,
            "initial": {"t": 0, "q": 1, "qdot": 0}, "t_end": 2, "checks": {"integrals": ["I2"]}}"#,
    );
    let o = bcklab(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bound to the linear potential"));
}

#[test]
fn malformed_configs_are_schema_errors() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_str().unwrap();
    for (name, text) in [
        ("syntax.json", "{"),
        (
            "unknown.json",
            r#"{"potential": {"kind": "free"}, "gamma": 0.5, "initial": {"t": 0, "q": 0, "qdot": 1}, "t_end": 2, "colour": 1}"#,
        ),
        (
            "gamma.json",
            r#"{"potential": {"kind": "free"}, "gamma": -1, "initial": {"t": 0, "q": 0, "qdot": 1}, "t_end": 2}"#,
        ),
        (
            "horizon.json",
            r#"{"potential": {"kind": "free"}, "gamma": 1, "initial": {"t": 0, "q": 0, "qdot": 1}, "t_end": 20}"#,
        ),
        (
            "domain.json",
            r#"{"potential": {"kind": "log", "A": 1}, "gamma": 1, "initial": {"t": 0, "q": -1, "qdot": 1}, "t_end": 2}"#,
        ),
    ] {
        let cfg = write(tmp.path(), name, text);
        let o = bcklab(&["simulate", "--config", &cfg, "--out", dir]);
        assert_eq!(o.status.code(), Some(2), "{name}");
    }
    let o = bcklab(&[
        "simulate",
        "--config",
        &tmp.path().join("missing.json").to_string_lossy(),
        "--out",
        dir,
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "strict.json",
        r#"{"potential": {"kind": "linear", "F": 1.0}, "gamma": 0.3,
            "initial": {"t": 0, "q": 0.5, "qdot": 0.2}, "t_end": 3,
            "checks": {"nonlocal": ["qDq"]}, "tolerances": {"nonlocal": 1e-30}}"#,
    );
    let out = tmp.path().join("out");
    let o = bcklab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&out.join("summary.json"))["pass"], false);
}

#[test]
fn integration_failure_exits_three() {
    let tmp = TempDir::new().unwrap();
    // attracted into the origin of the log potential
    let cfg = write(
        tmp.path(),
        "fall.json",
        r#"{"potential": {"kind": "log", "A": 1.0}, "gamma": 0.2,
            "initial": {"t": 0, "q": 0.5, "qdot": -1.0}, "t_end": 5, "checks": {"integrals": ["IV1"]}}"#,
    );
    let out = tmp.path().join("out");
    let o = bcklab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let s = json(&out.join("summary.json"));
    assert!(s["integration_error"]
        .as_str()
        .unwrap()
        .contains("left the potential domain"));
}

#[test]
fn central_orbit_and_json_output() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "orbit.json",
        r#"{"potential": {"kind": "log", "A": -1.0}, "gamma": 0.25,
            "initial3d": {"t": 0, "r": [1.5, 0, 0.2], "v": [0, 0.6, 0.1]}, "t_end": 4,
            "checks": {"central3d": true}}"#,
    );
    let csv_dir = tmp.path().join("csv");
    let o = bcklab(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        csv_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let csv = fs::read_to_string(csv_dir.join("orbit_0.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,x,y,z,vx,vy,vz,lx,ly,lz");
    let names: Vec<String> = json(&csv_dir.join("summary.json"))["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap().to_owned())
        .collect();
    assert!(names.iter().any(|n| n == "planarity"));
    assert!(names.iter().any(|n| n == "drift IV1 3D"));

    let json_dir = tmp.path().join("json");
    let o = bcklab(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        json_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let table = json(&json_dir.join("orbit_0.json"));
    assert_eq!(table["columns"].as_array().unwrap().len(), 10);
    assert_eq!(
        table["rows"].as_array().unwrap().len(),
        csv.lines().count() - 1
    );
}

fn sweep_rows(dir: &Path) -> Vec<Value> {
    json(&dir.join("sweep.json"))["rows"]
        .as_array()
        .unwrap()
        .clone()
}

#[test]
fn gamma_sweep_over_free_particle() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "sweep.json",
        r#"{"base": {"potential": {"kind": "free"}, "gamma": 0.5, "initial": {"t": 0, "q": 0, "qdot": 1},
                     "t_end": 5, "checks": {"integrals": ["I1"], "weak_constant": true}},
            "grid": {"gamma": [0.1, 0.5, 1.0]}}"#,
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let o = bcklab(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = sweep_rows(&a);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["status"] == "pass"));
    assert_eq!(rows[2]["point"]["gamma"], 1.0);

    bcklab(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        b.to_str().unwrap(),
        "--jobs",
        "1",
    ]);
    assert_eq!(
        without_runtime(json(&a.join("sweep.json"))),
        without_runtime(json(&b.join("sweep.json")))
    );
}

#[test]
fn excluded_alpha_rows_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "alpha.json",
        r#"{"base": {"potential": {"kind": "power", "A": 1.0, "alpha": -1.0}, "gamma": 0.3,
                     "initial": {"t": 0, "q": 1, "qdot": 0.2}, "t_end": 3, "checks": {"integrals": ["IV2"]}},
            "grid": {"alpha": [-1.0, 2.0, -0.5]}}"#,
    );
    let out = tmp.path().join("out");
    let o = bcklab(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let rows = sweep_rows(&out);
    let status: Vec<&str> = rows.iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(status, ["pass", "rejected", "pass"]);
    assert!(rows[1]["error"]
        .as_str()
        .unwrap()
        .contains("alpha = 2 is excluded"));
}

#[test]
fn empty_grid_gives_empty_summary() {
    let tmp = TempDir::new().unwrap();
    for (name, grid) in [("none.json", "{}"), ("hollow.json", r#"{"gamma": []}"#)] {
        let cfg = write(
            tmp.path(),
            name,
            &format!(
                r#"{{"base": {{"potential": {{"kind": "free"}}, "gamma": 0.5,
                     "initial": {{"t": 0, "q": 0, "qdot": 1}}, "t_end": 1}}, "grid": {grid}}}"#
            ),
        );
        let out = tmp.path().join(name.replace(".json", ""));
        let o = bcklab(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(sweep_rows(&out).is_empty());
    }
}

#[test]
fn catalog_lists_generators_integrals_and_charts() {
    let o = bcklab(&["catalog"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["name"].as_str().unwrap())
        .collect();
    for n in [
        "X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "V1", "V2", "V3", "qDq",
    ] {
        assert!(names.contains(&n), "{n}");
    }
    assert_eq!(v["integrals"].as_array().unwrap().len(), 11);
    assert_eq!(v["charts"].as_array().unwrap().len(), 8);

    let o = bcklab(&["catalog", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("name,source,kind,binding,tau,xi,f,integral,sign\n"));
    assert_eq!(text.lines().count(), names.len() + 1);
}

#[test]
fn verify_runs_scenario_checks() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "free.json", FREE);
    let out = tmp.path().join("out");
    let o = bcklab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("summary.json").exists());
    assert!(!out.join("trajectory_0.csv").exists());
    assert!(String::from_utf8_lossy(&o.stdout)
        .lines()
        .all(|l| l.starts_with("[PASS]")));
}

#[test]
fn suite_preset_runs_every_criterion() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = bcklab(&[
        "verify",
        "--preset",
        "paper-suite",
        "--out",
        out.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 10, "{stdout}");
    for (k, line) in lines.iter().enumerate() {
        assert!(line.contains(&format!("{:>2}. ", k + 1)), "{line}");
    }
    let s = json(&out.join("summary.json"));
    let pass = s["pass"].as_bool().unwrap();
    assert_eq!(o.status.code(), Some(if pass { 0 } else { 1 }));
    assert_eq!(pass, lines.iter().all(|l| l.starts_with("[PASS]")));
    assert_eq!(s["scenario"]["preset"], "paper-suite");

    let o = bcklab(&[
        "verify",
        "--preset",
        "nonsense",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
