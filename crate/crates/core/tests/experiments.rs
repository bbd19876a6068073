use neuroram::experiment::{run_experiment, ExperimentConfig, ExperimentKind};

#[test]
fn indexing_exhaustive_n4() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::IndexingExhaustive, 4, 100, 1);
    cfg.lambda = Some("1/32".into());
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.rows.len(), 64);
    assert!(r.summary.min_rate >= 0.99);
    assert!(r.summary.passed);
    assert!(r.rows.iter().all(|row| row.successes <= row.trials));
}

#[test]
fn clock_n16() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Clock, 16, 100, 2);
    cfg.lambda = Some("1/32".into());
    let r = run_experiment(&cfg).unwrap();
    assert!(r.summary.min_rate >= 0.99, "{:?}", r.rows);
}

#[test]
fn equivalence_flag() {
    let cfg = ExperimentConfig::new(ExperimentKind::Equivalence, 0, 100_000, 14);
    let r = run_experiment(&cfg).unwrap();
    assert!(r.summary.passed, "{:?}", r.summary);
    assert!(r.summary.extra["delta"] <= 0.01);
}

#[test]
fn similarity_n16() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Similarity, 16, 50, 3);
    cfg.lambda = Some("1/32".into());
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.rows.len(), 3);
    assert!(r.summary.passed, "{:?}", r.rows);
}

#[test]
fn csv_written_and_stable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let mut cfg = ExperimentConfig::new(ExperimentKind::IndexingSampled, 16, 5, 4);
    cfg.cases = Some(6);
    cfg.lambda = Some("1/32".into());
    cfg.output = Some(path.clone());
    run_experiment(&cfg).unwrap();
    let first = std::fs::read(&path).unwrap();
    run_experiment(&cfg).unwrap();
    assert_eq!(first, std::fs::read(&path).unwrap());
}

#[test]
fn failing_threshold_is_reported() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::IndexingSampled, 4, 20, 5);
    cfg.cases = Some(4);
    cfg.lambda = Some("4/1".into());
    cfg.min_rate = Some(0.99);
    let r = run_experiment(&cfg).unwrap();
    assert!(!r.summary.passed);
    assert!(!r.summary.failures.is_empty());
}

#[test]
fn config_from_json() {
    let cfg: ExperimentConfig =
        serde_json::from_str(r#"{"kind": "vc", "cases": 5, "seed": 2}"#).unwrap();
    assert_eq!(cfg.kind, ExperimentKind::Vc);
    assert!(run_experiment(&cfg).unwrap().summary.passed);
}
