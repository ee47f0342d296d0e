use std::process::{Command, Output};

fn persuade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persuade")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

const BASE: &str = r#"{"p0":0.5,"lambda":1.0,"r_P":0.1,"r_A":0.1,"y_L":0.5,"y_H":3.0,"z":1.0,"Y":2.0,"Z":1.0,"mu0":0.5}"#;

#[test]
fn validate_baseline() {
    let o = persuade(&["validate"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert!((v["thresholds"]["mu_star"].as_f64().unwrap() - 0.6).abs() < 1e-9);
    assert_eq!(code(&persuade(&["validate", "--config", BASE])), 0);
}

#[test]
fn config_errors_exit_with_two() {
    let missing = BASE.replace(r#""p0":0.5,"#, "");
    let o = persuade(&["validate", "--config", &missing]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("p0"), "{}", stderr(&o));

    let order = BASE.replace(r#""Y":2.0"#, r#""Y":0.4"#);
    let o = persuade(&["validate", "--config", &order]);
    assert_eq!(code(&o), 2);

    assert_eq!(code(&persuade(&["validate", "--mu0", "1.2"])), 2);
    assert_eq!(code(&persuade(&["validate", "--config", "{not json"])), 2);
    assert_eq!(code(&persuade(&["validate", "--config", "/no/such/file.json"])), 2);
    assert_eq!(code(&persuade(&["sweep", "--mu0-range", "0.5:0.4:3"])), 2);
}

#[test]
fn unequal_rates_are_refused_by_the_commitment_solver() {
    let cfg = BASE.replace(r#""r_A":0.1"#, r#""r_A":1.0"#).replace(r#""y_H":3.0"#, r#""y_H":21.0"#);
    let o = persuade(&["solve-dynamic", "--config", &cfg, "--mu0", "0.13"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("[dynamic]"));
    let o = persuade(&["gradual", "--config", &cfg, "--mu0", "0.13"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert!(v["solution"]["payoff"].as_f64().unwrap() > v["solution"]["two_point_payoff"].as_f64().unwrap());
}

#[test]
fn solve_dynamic_reports_the_regime() {
    let o = persuade(&["solve-dynamic", "--mu0", "0.45"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["solution"]["regime"], "BrakeOnly");
    assert!((v["solution"]["payoff"].as_f64().unwrap() - 1.2735497).abs() < 1e-6);
    assert!(stderr(&o).contains("dynamic: BrakeOnly"));
}

#[test]
fn sweep_csv_has_a_row_per_prior() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = persuade(&["sweep", "--mu0-range", "0.3:0.7:9", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("mu0,"));
    assert!(o.stdout.is_empty());
}

#[test]
fn outputs_are_reproducible() {
    for args in [
        &["solve-dynamic", "--mu0", "0.32"][..],
        &["simulate", "--policy", "mpe", "--paths", "20000", "--seed", "5"][..],
        &["continuous", "--grid", "65"][..],
    ] {
        let a = persuade(args);
        let b = persuade(args);
        assert_eq!(code(&a), 0, "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn solved_policy_round_trips_into_the_simulator() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dynamic.json");
    let o = persuade(&["solve-dynamic", "--mu0", "0.3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = persuade(&["simulate", "--mu0", "0.3", "--policy-file", path.to_str().unwrap(), "--paths", "50000"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    let (m, se) = (v["result"]["principal_mean"].as_f64().unwrap(), v["result"]["principal_se"].as_f64().unwrap());
    assert!((m - v["quadrature"]["principal"].as_f64().unwrap()).abs() < 4.0 * se);
    assert_eq!(v["result"]["obedience_violations"], 0);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[1, 2]").unwrap();
    assert_eq!(code(&persuade(&["simulate", "--policy-file", bad.to_str().unwrap()])), 2);
}

#[test]
fn oracle_gap_goes_to_stderr() {
    let o = persuade(&["oracle", "--mu0", "0.3", "--grid", "100"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("relative"));
    assert!(json(&o)["relative_gap"].as_f64().unwrap() < 1e-4);
    // an impossible bound is a tolerance failure
    assert_eq!(code(&persuade(&["oracle", "--mu0", "0.3", "--grid", "50", "--gap-bound", "0"])), 4);
}

#[test]
fn other_commands_run() {
    for args in [&["solve-static", "--mu0", "0.3"][..], &["no-commitment", "--mu0", "0.4"][..]] {
        let o = persuade(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    }
    let o = persuade(&["no-commitment", "--mu0", "0.4", "--format", "csv"]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("t,F_H,F_L"));
}
