use std::path::Path;
use std::process::{Command, Output};

fn neuroram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neuroram"))
        .args(args)
        .env("NEURORAM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn index_row() {
    let o = neuroram(&[
        "index", "--n", "4", "--x", "0110", "--k", "2", "--trials", "30", "--lambda", "1/32",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n,x,y,truth,trials,successes\n4,0110,10,1,30,30\n");
}

#[test]
fn similarity_row() {
    let o = neuroram(&[
        "similarity", "--n", "16", "--x1", "1111000011110000", "--x2", "1111000011110000",
        "--trials", "10", "--lambda", "1/32",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "16,0.25,0,10,0");
}

#[test]
fn unroll_derandomize_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.json");
    let ff = dir.path().join("ff.json");
    let tc = dir.path().join("tc.json");
    let net_json = neuroram::io::network_to_json(&neuroram::transforms::random_network(
        2,
        2,
        7,
        neuroram::Temperature::new(1, 4).unwrap(),
    ));
    std::fs::write(&net, net_json).unwrap();
    assert!(neuroram(&["unroll", "--net", path(&net), "--t", "3", "--out", path(&ff)]).status.success());
    let o = neuroram(&["derandomize", "--net", path(&ff), "--seed", "5", "--out", path(&tc)]);
    assert!(o.status.success());
    let circuit = neuroram::io::circuit_from_json(&std::fs::read_to_string(&tc).unwrap()).unwrap();
    assert_eq!(circuit.ff.auxiliary_count(), 2 * 3);

    let o = neuroram(&["run", "--net", path(&net), "--input", "10", "--rounds", "3", "--seed", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 5);

    let o = neuroram(&["equiv", "--net", path(&net), "--input", "10", "--t", "3", "--trials", "20000"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(o.status.success(), report["within_threshold"].as_bool().unwrap());
}

#[test]
fn experiment_failure_is_machine_readable() {
    let o = neuroram(&[
        "experiment", "--kind", "indexing-sampled", "--n", "4", "--trials", "20", "--cases", "4",
        "--lambda", "4/1", "--min-rate", "0.99",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "fail");
    assert!(!v["summary"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn experiment_from_config_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let csv = dir.path().join("out.csv");
    std::fs::write(&cfg, r#"{"kind": "indexing-exhaustive", "n": 4, "trials": 10, "lambda": "1/32"}"#)
        .unwrap();
    let o = neuroram(&["experiment", "--config", path(&cfg), "--output", path(&csv)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "case,truth,trials,successes,rate");
    assert_eq!(text.lines().count(), 65);
}

#[test]
fn bad_parameters_exit_two_with_json() {
    let o = neuroram(&["build-neuroram", "--n", "12"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["status"], "error");
}

#[test]
fn vc_count_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let arch = dir.path().join("arch.json");
    let samples = dir.path().join("samples.json");
    let a = neuroram::vc::random_architecture(2, 3, 11);
    let s = neuroram::vc::random_samples(3, 5, 12).unwrap();
    std::fs::write(&arch, serde_json::to_string(&a).unwrap()).unwrap();
    std::fs::write(&samples, serde_json::to_string(&s).unwrap()).unwrap();
    let o = neuroram(&["vc", "count", "--arch", path(&arch), "--samples", path(&samples)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let expected = neuroram::vc::count_dichotomies(&a, &s).unwrap().count;
    assert_eq!(v["count"], expected.to_string());
    assert_eq!(v["within_bound"], true);
}
