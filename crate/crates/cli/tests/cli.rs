use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bgcsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgcsp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn merge_prints_the_merged_skewness() {
    let o = bgcsp(&["merge", "--betas", "0.5,0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 0.8);
    let o = bgcsp(&["merge", "--betas", "-0.4,0.4"]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = bgcsp(&["merge", "--betas", "1,-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("singular"));
}

#[test]
fn ladder_is_emitted_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ladder.json");
    let o = bgcsp(&["ladder", "--psi", "quadratic:10", "--n", "16", "--emit", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["half_count"], 16);
    assert_eq!(v["schedule"], "psi_proportional");
    assert_eq!(v["positions"].as_array().unwrap().len(), 32);
    assert_eq!(v["psi"]["kind"], "quadratic");

    let o = bgcsp(&["ladder", "--psi", "quadratic:10", "--n", "3", "--width", "6", "--schedule", "geometric:0.5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["betas"], serde_json::json!([-1.0, -0.5, -0.25, 0.25, 0.5, 1.0]));
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_errors_exit_with_one_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"name": "x", "process": {"type": "unconstrained"}, "n_paths": 0, "n_steps": 10, "horizon": 1.0, "master_seed": 1}"#,
    );
    let o = bgcsp(&["simulate", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("n_paths"), "{}", stderr(&o));

    let config = write_config(dir.path(), "{\"name\": \"x\",\n \"process\": {\"type\": \"bogus\"}}");
    let o = bgcsp(&["simulate", "--config", &config]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("process") && stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn numeric_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"name": "x", "process": {"type": "unconstrained"}, "mu": 1e308, "n_paths": 5, "n_steps": 10, "horizon": 1e10, "master_seed": 1}"#,
    );
    let o = bgcsp(&["simulate", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("path 0 at step 1"), "{}", stderr(&o));
}

#[test]
fn simulate_writes_declared_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"name": "walls", "process": {"type": "msbm", "barriers": [{"position": -1.0, "beta": 1.0}, {"position": 1.0, "beta": -1.0}]},
            "n_paths": 200, "n_steps": 50, "horizon": 5.0, "master_seed": 3,
            "outputs": ["terminal_csv", "ledger_csv", "barrier_estimate_json"]}"#,
    );
    let out = dir.path().join("out");
    let o = bgcsp(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("200 paths x 50 steps"));
    let ledger = fs::read_to_string(out.join("walls_ledger.csv")).unwrap();
    assert!(ledger.starts_with("t,L_x1,L_x2\n"));
    let terminal = fs::read_to_string(out.join("walls_terminal.csv")).unwrap();
    for line in terminal.lines().skip(1) {
        let x: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((-1.0..=1.0).contains(&x));
    }
}

#[test]
fn reproduce_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, workers: &str| {
        let out = dir.path().join(sub);
        let o = bgcsp(&["reproduce", "fig13", "--paths", "400", "--steps", "200", "--workers", workers, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let a = run("a", "1");
    let b = run("b", "4");
    let c = run("c", "4");
    for file in ["fig13_bgc_paths.csv", "fig13_bgc_terminal.csv", "fig13_bgc_histogram.csv", "fig13_bgc_barrier.json", "fig13_bgc_density.svg"] {
        let x = fs::read(a.join(file)).unwrap();
        assert_eq!(x, fs::read(b.join(file)).unwrap(), "{file}");
        assert_eq!(x, fs::read(c.join(file)).unwrap(), "{file}");
    }
    let o = bgcsp(&["reproduce", "fig99"]);
    assert_eq!(o.status.code(), Some(1));
}
