use neuroram::io::{
    circuit_from_json, circuit_to_json, feedforward_from_json, feedforward_to_json, load_network,
    network_from_json, network_to_json, save_network,
};
use neuroram::model::Temperature;
use neuroram::neuroram::build_neuro_ram;
use neuroram::transforms::{eval_threshold_circuit, random_network, sample_threshold_circuit, unroll};
use neuroram::Error;

#[test]
fn neuroram_file_round_trip() {
    let (net, _) = build_neuro_ram(16, true, Temperature::new(1, 32).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.json");
    save_network(&net, &path).unwrap();
    let back = load_network(&path).unwrap();
    let mut a: Vec<_> = net.synapses().map(|s| (s.pre, s.post, s.weight)).collect();
    let mut b: Vec<_> = back.synapses().map(|s| (s.pre, s.post, s.weight)).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
    assert_eq!(back, net);
}

#[test]
fn feedforward_and_circuit_round_trip() {
    let net = random_network(3, 2, 8, Temperature::new(1, 4).unwrap());
    let ff = unroll(&net, 3).unwrap();
    let ff_back = feedforward_from_json(&feedforward_to_json(&ff)).unwrap();
    assert_eq!(ff_back, ff);
    let tc = sample_threshold_circuit(&ff, 77);
    let tc_back = circuit_from_json(&circuit_to_json(&tc)).unwrap();
    assert_eq!(tc_back, tc);
    for v in 0..8u64 {
        let bits = neuroram::bits::bin(v, 3).unwrap();
        assert_eq!(
            eval_threshold_circuit(&tc, &bits).unwrap(),
            eval_threshold_circuit(&tc_back, &bits).unwrap()
        );
    }
}

#[test]
fn broken_layering_is_rejected_on_load() {
    let net = random_network(2, 2, 3, Temperature::new(1, 4).unwrap());
    let ff = unroll(&net, 3).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&feedforward_to_json(&ff)).unwrap();
    v["layers"] = serde_json::json!([]);
    assert!(feedforward_from_json(&v.to_string()).is_err());
}

#[test]
fn schema_errors_carry_paths() {
    let net = random_network(1, 1, 0, Temperature::new(1, 4).unwrap());
    let mut v: serde_json::Value = serde_json::from_str(&network_to_json(&net)).unwrap();
    v["neurons"][1]["kind"] = serde_json::json!("sensor");
    match network_from_json(&v.to_string()) {
        Err(Error::Parse { path, .. }) => assert_eq!(path, "neurons[1].kind"),
        other => panic!("{other:?}"),
    }
    v["neurons"][1]["kind"] = serde_json::json!("auxiliary");
    assert!(network_from_json(&v.to_string()).is_ok());
    v.as_object_mut().unwrap().remove("lambda");
    let err = network_from_json(&v.to_string()).unwrap_err().to_string();
    assert!(err.contains("lambda"), "{err}");
}
