use num_bigint::BigInt;
use proptest::prelude::*;
use rayon::prelude::*;

use neuroram::dynamics::firing_probability;
use neuroram::model::{validate, NetworkBuilder, NeuronKind, Polarity, Temperature};
use neuroram::rng::derive_seed;
use neuroram::transforms::threshold::sample_and_eval;
use neuroram::transforms::{
    distribution_equivalence, joint_law_tv, random_network, unroll, FeedforwardNetwork,
};

fn lam() -> Temperature {
    Temperature::new(1, 4).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unrolled_nets_are_layered(inputs in 1usize..4, aux in 0usize..5, t in 2usize..6, seed in any::<u64>()) {
        let net = random_network(inputs, aux, seed, lam());
        let ff = unroll(&net, t).unwrap();
        prop_assert!(ff.is_acyclic());
        prop_assert!(ff.check_layering().is_ok());
        prop_assert!(validate(&ff.net).is_empty());
        prop_assert_eq!(ff.auxiliary_count(), (t - 1) * (aux + 1));
        prop_assert_eq!(ff.net.auxiliary_count(), (t - 1) * (aux + 1));
    }
}

fn single_gate(bias: i64, lambda: Temperature) -> FeedforwardNetwork {
    let mut b = NetworkBuilder::new();
    let x = b.input("x");
    let z = b.add("z", NeuronKind::Output, Polarity::Excitatory, bias);
    b.connect(x, z, 3);
    FeedforwardNetwork::new(b.build(lambda), vec![x], vec![], z).unwrap()
}

// two-sided exact binomial tail probability of seeing `k` hits
fn binomial_tail(k: u64, n: u64, p: f64) -> f64 {
    let mut lg = vec![0.0f64; n as usize + 1];
    for v in 1..=n as usize {
        lg[v] = lg[v - 1] + (v as f64).ln();
    }
    let ln_pmf = |i: u64| {
        let (i, n) = (i as usize, n as usize);
        lg[n] - lg[i] - lg[n - i] + i as f64 * p.ln() + (n - i) as f64 * (1.0 - p).ln()
    };
    let mean = n as f64 * p;
    let window = (60.0 * (mean.max(1.0)).sqrt() + 60.0) as u64;
    let lo = (mean as u64).saturating_sub(window);
    let hi = (mean as u64 + window).min(n);
    let (a, b) = if (k as f64) <= mean { (lo, k) } else { (k, hi) };
    let one_side: f64 = (a..=b).map(|i| ln_pmf(i).exp()).sum();
    (2.0 * one_side).min(1.0)
}

#[test]
fn per_gate_marginal_law() {
    let lambda = Temperature::new(1, 2).unwrap();
    let trials = 200_000u64;
    for bias in [1i64, 2, 3, 4, 5] {
        let ff = single_gate(bias, lambda);
        for input in [false, true] {
            let hits = (0..trials)
                .into_par_iter()
                .filter(|&s| sample_and_eval(&ff, &[input], derive_seed(40, bias as u64, s)).unwrap()[ff.output.0])
                .count() as u64;
            let w = if input { 3 } else { 0 };
            let p = firing_probability(&BigInt::from(w - bias), lambda);
            let tail = binomial_tail(hits, trials, p);
            assert!(tail >= 1e-4, "bias {bias} input {input}: {hits}/{trials} vs p {p}, tail {tail}");
        }
    }
}

#[test]
fn zero_potential_net_is_fair_on_both_sides() {
    let mut b = NetworkBuilder::new();
    b.input("x");
    b.excitatory("a", 0);
    b.add("z", NeuronKind::Output, Polarity::Excitatory, 0);
    let net = b.build(lam());
    let r = distribution_equivalence(&net, &[true], 3, 100_000, 41).unwrap();
    assert!((r.p_snn - 0.5).abs() <= 0.01, "{r:?}");
    assert!((r.p_circuit - 0.5).abs() <= 0.01, "{r:?}");
}

#[test]
fn joint_law_matches() {
    for seed in [4u64, 14, 26] {
        let net = random_network(3, 2, seed, lam());
        let d = joint_law_tv(&net, &[true, false, true], 3, 100_000, 42).unwrap();
        assert!(d <= 0.02, "seed {seed}: tv {d}");
    }
}

#[test]
fn circuit_evaluation_is_pure() {
    let net = random_network(3, 3, 5, lam());
    let ff = unroll(&net, 4).unwrap();
    let tc = neuroram::transforms::sample_threshold_circuit(&ff, 9);
    let first: Vec<bool> = (0..8u64)
        .map(|v| {
            let bits = neuroram::bits::bin(v, 3).unwrap();
            neuroram::transforms::eval_threshold_circuit(&tc, &bits).unwrap()
        })
        .collect();
    for _ in 0..5 {
        let again: Vec<bool> = (0..8u64)
            .map(|v| {
                let bits = neuroram::bits::bin(v, 3).unwrap();
                neuroram::transforms::eval_threshold_circuit(&tc, &bits).unwrap()
            })
            .collect();
        assert_eq!(first, again);
    }
}
