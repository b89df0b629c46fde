//! End-to-end runs of the command-line tool.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rcinterface"))
}

fn run(args: &[&str]) -> (bool, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.success(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn verify_only_runs_one_suite() {
    let (ok, out) = run(&["verify", "--only", "log-partition"]);
    assert!(ok, "{out}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("PASS log-partition"));
}

#[test]
fn injected_corruption_is_reported() {
    let (ok, out) = run(&["verify", "--quick", "--only", "bijection"]);
    assert!(ok, "{out}");
    let (ok, out) = run(&["verify", "--quick", "--only", "bijection", "--inject-failure", "7"]);
    assert!(!ok);
    assert!(out.starts_with("FAIL bijection"), "{out}");
    assert!(out.contains("(#7)"), "{out}");
    assert!(out.contains("stored interface"), "{out}");
}

#[test]
fn unknown_suite_exits_with_error() {
    let out = bin().args(["verify", "--only", "nothing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sampled_dumps_can_be_analysed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (ok, _) = run(&[
        "sample", "--l", "3", "--m", "3", "--p", "0.8", "--samples", "3", "--burn-in", "10", "--out-dir", d,
    ]);
    assert!(ok);
    for i in 0..3 {
        let path = dir.path().join(format!("interface_{i:05}.json"));
        let (ok, out) = run(&["analyze-interface", path.to_str().unwrap()]);
        assert!(ok);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["l"], 3);
        assert!(v["property_violations"].as_array().unwrap().is_empty());
        for w in v["walls"].as_array().unwrap() {
            assert!(w["bound_failures"].as_array().unwrap().is_empty());
        }
    }
}

#[test]
fn show_config_prints_the_defaults() {
    let (ok, out) = run(&["experiment", "displacement", "--show-config", "--seed", "9"]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "displacement");
    assert_eq!(v["seed"], 9);
    assert_eq!(v["m_factors"], serde_json::json!([1, 2]));
}

#[test]
fn experiment_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"p": [0.9, 0.7], "l": [2], "sampler": {"burn_in": 20, "interval": 1, "samples": 150, "replicas": 2}}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}.csv"));
        let (ok, _) = run(&[
            "experiment", "rigidity", "--config", cfg.to_str().unwrap(), "--seed", "4", "--out", out.to_str().unwrap(),
        ]);
        assert!(ok);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), rcinterface_cli::output::HEADER);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty());
    // Rows are sorted by p first.
    let ps: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(ps.windows(2).all(|w| w[0] <= w[1]));
    assert!(rows.iter().all(|r| r[9].parse::<f64>().unwrap() >= 100.0));
}
