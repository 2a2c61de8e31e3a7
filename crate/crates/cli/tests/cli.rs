use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn caplaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caplaw"))
        .args(args)
        .env_remove("CAPLAW_MAX_DRAWS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn conjugate_rows_match() {
    let v = json(&caplaw(&["conjugate", "--p", "3", "--y", "2,-2,0"]));
    let rows = v["rows"].as_array().unwrap();
    let q: f64 = 1.5;
    let expected = 2f64.powf(q) / q - 1.0 / q + 0.5;
    for r in &rows[..2] {
        assert!((r["analytic"].as_f64().unwrap() - expected).abs() < 1e-12);
        assert!(r["abs_diff"].as_f64().unwrap() < 1e-6);
    }
    assert_eq!(rows[2]["numeric"].as_f64().unwrap(), 0.0);
}

#[test]
fn conjugate_csv_has_round_trip_precision() {
    let out = caplaw(&["conjugate", "--p", "2", "--y", "0.1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,analytic,numeric,abs_diff"));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    let y: f64 = fields[0].parse().unwrap();
    assert_eq!(y, 0.1);
    let mantissa = fields[1].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn scaled_conjugate_agrees() {
    let v = json(&caplaw(&[
        "conjugate",
        "--a",
        "2",
        "--b",
        "3",
        "--grid",
        "-10,10,11",
    ]));
    for r in v["rows"].as_array().unwrap() {
        let y = r["y"].as_f64().unwrap();
        assert!((r["analytic"].as_f64().unwrap() - y * y / 36.0).abs() < 1e-12);
        assert!(r["abs_diff"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn conjugate_rejects_p_one() {
    let out = caplaw(&["conjugate", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("dual index undefined"));
}

#[test]
fn tau_recovers_sigma() {
    for sigma in ["1", "2"] {
        let v = json(&caplaw(&["tau", "--sigma", sigma]));
        let tau = v["tau"].as_f64().unwrap();
        assert!(
            (tau - sigma.parse::<f64>().unwrap()).abs() < 1e-4,
            "tau = {tau}"
        );
        assert_eq!(v["certificate"]["provenance"], "exact-gaussian");
        assert_eq!(v["certificate"]["holds"], true);
    }
}

#[test]
fn tau_mc_oracle_is_marked_statistical() {
    let v = json(&caplaw(&[
        "tau",
        "--oracle",
        "mc",
        "--samples",
        "20000",
        "--a-hi",
        "8",
    ]));
    assert_eq!(v["certificate"]["statistical"], true);
    assert!((v["tau"].as_f64().unwrap() - 1.0).abs() < 0.5);
}

#[test]
fn tau_small_bracket_exits_3() {
    let out = caplaw(&["tau", "--a-hi", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn tau_constant_variable_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"family": {"discrete": {"outcomes": 1, "measures": [[1.0]]}}, "values": [2.0]}"#,
    );
    let out = caplaw(&["--config", &cfg, "tau"]);
    assert!(stderr(&out).contains("degenerate"));
    assert_eq!(json(&out)["degenerate"], true);
}

#[test]
fn tailbound_values() {
    let v = json(&caplaw(&["tailbound", "--eps", "3", "--empirical"]));
    let row = &v["rows"][0];
    assert!((row["bound"].as_f64().unwrap() - 2.0 * (-4.5f64).exp()).abs() < 1e-15);
    let emp = row["empirical"].as_f64().unwrap();
    assert!((emp - 0.0027).abs() < 3e-4, "empirical = {emp}");

    let tiny = json(&caplaw(&["tailbound", "--eps", "1e-9"]));
    assert!((tiny["rows"][0]["bound"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn tailbound_zero_a_exits_2() {
    assert_eq!(caplaw(&["tailbound", "--a", "0"]).status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "b.json", "{not json");
    assert_eq!(caplaw(&["--config", &broken, "tau"]).status.code(), Some(2));
    let unknown = write(dir.path(), "u.json", r#"{"sigmaa": 1}"#);
    assert_eq!(
        caplaw(&["--config", &unknown, "tau"]).status.code(),
        Some(2)
    );
    let wrong = write(dir.path(), "w.json", r#"{"command": "slln"}"#);
    assert_eq!(caplaw(&["--config", &wrong, "tau"]).status.code(), Some(2));
}

#[test]
fn verify_default_family_passes() {
    let v = json(&caplaw(&["verify"]));
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["factorization"]["lhs"].as_f64().unwrap(), 0.25);
    assert!((v["factorization"]["rhs"].as_f64().unwrap() - 0.4).abs() < 1e-15);
    assert_eq!(v["factorization"]["strict"], true);
}

#[test]
fn verify_rejects_bad_measure() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(
        dir.path(),
        "f.json",
        r#"{"discrete": {"outcomes": 2, "measures": [[0.5, 0.4]]}}"#,
    );
    let out = caplaw(&["verify", "--family", &fam]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sums to 0.9"));
}

#[test]
fn slln_desk_run_passes() {
    let v = json(&caplaw(&["slln"]));
    assert!(v["estimate"]["upper_deviation"].as_f64().unwrap() < 0.01);
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn slln_trivial_family_is_sandwiched() {
    let v = json(&caplaw(&[
        "slln",
        "--means",
        "0",
        "--epsilon",
        "100",
        "--n-steps",
        "200",
        "--n-paths",
        "20",
        "--n-min",
        "10",
    ]));
    assert_eq!(v["estimate"]["lower_sandwich"].as_f64().unwrap(), 1.0);
}

#[test]
fn slln_over_cap_exits_4() {
    let out = Command::new(env!("CARGO_BIN_EXE_caplaw"))
        .args(["slln"])
        .env("CAPLAW_MAX_DRAWS", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn slln_wrong_rate_is_an_invariant_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = caplaw(&[
        "slln",
        "--c",
        "0.01",
        "--n-steps",
        "1000",
        "--n-paths",
        "100",
        "--n-min",
        "500",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(5));
    assert!(out_dir.join("slln.json").exists());
}

#[test]
fn echo_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let first = caplaw(&[
        "--seed",
        "7",
        "--out",
        a.to_str().unwrap(),
        "slln",
        "--n-steps",
        "2000",
        "--n-paths",
        "50",
        "--n-min",
        "1000",
    ]);
    assert!(first.status.success(), "{}", stderr(&first));
    let echo = a.join("config.json");
    let second = caplaw(&[
        "--config",
        echo.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
        "slln",
    ]);
    assert!(second.status.success(), "{}", stderr(&second));
    for name in [
        "config.json",
        "slln.json",
        "slln_checkpoints.csv",
        "slln_series.csv",
    ] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name} differs"
        );
    }
    let header = fs::read_to_string(a.join("slln_checkpoints.csv")).unwrap();
    assert!(header.starts_with("m,n,deviation_frequency,lemma_bound,theorem_bound\n"));
    let series = fs::read_to_string(a.join("slln_series.csv")).unwrap();
    assert!(series.starts_with("n,partial_sum,integral_bound\n"));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.json",
        r#"{"eps": [1.0], "a": 2.0, "seed": 3}"#,
    );
    let v = json(&caplaw(&["--config", &cfg, "tailbound", "--a", "1"]));
    assert_eq!(v["resolved_config"]["a"].as_f64().unwrap(), 1.0);
    assert_eq!(v["resolved_config"]["seed"].as_u64().unwrap(), 3);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}
