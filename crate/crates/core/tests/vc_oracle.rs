mod common;

use proptest::prelude::*;

use neuroram::vc::{
    baum_product_bound, circuit_vc_upper, count_dichotomies, random_architecture, random_samples,
    vc_by_enumeration, SampleSet, VarGate, VarThresholdArchitecture,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_matches_grid(m in 1usize..=3, d in 1usize..=4, z in 0usize..=6, seed in any::<u64>()) {
        let z = z.min(1 << d);
        let arch = random_architecture(m, d, seed);
        let samples = random_samples(d, z, seed ^ 1).unwrap();
        let c = count_dichotomies(&arch, &samples).unwrap();
        prop_assert_eq!(c.count, common::grid_dichotomies(&arch, &samples, 0.25) as u128);
        prop_assert!(num_bigint::BigUint::from(c.count) <= baum_product_bound(&c.per_gate));
        if z >= 2 && m >= 2 {
            prop_assert!(c.count <= (z as u128).pow(m as u32));
        }
    }

    #[test]
    fn adding_a_sample_never_lowers_the_count(m in 1usize..=3, d in 2usize..=4, z in 1usize..=5, seed in any::<u64>()) {
        let arch = random_architecture(m, d, seed);
        let more = random_samples(d, (z + 1).min(1 << d), seed ^ 2).unwrap();
        let fewer = SampleSet::new(d, more.points[..more.len() - 1].to_vec()).unwrap();
        prop_assert!(count_dichotomies(&arch, &fewer).unwrap().count
            <= count_dichotomies(&arch, &more).unwrap().count);
    }

    #[test]
    fn single_gate_at_most_z_plus_one(d in 1usize..=4, z in 0usize..=8, seed in any::<u64>()) {
        let z = z.min(1 << d);
        let arch = random_architecture(1, d, seed);
        let samples = random_samples(d, z, seed ^ 3).unwrap();
        prop_assert!(count_dichotomies(&arch, &samples).unwrap().count <= z as u128 + 1);
    }
}

#[test]
fn two_gate_chain_on_four_samples() {
    let arch = VarThresholdArchitecture::new(
        3,
        vec![
            VarGate {
                input_weights: vec![1.0, -1.0, 0.5],
                gate_weights: vec![],
            },
            VarGate {
                input_weights: vec![0.5, 1.0, -2.0],
                gate_weights: vec![(0, 1.5)],
            },
        ],
    )
    .unwrap();
    for seed in 0..20 {
        let samples = random_samples(3, 4, seed).unwrap();
        let c = count_dichotomies(&arch, &samples).unwrap().count;
        assert!(c <= 25);
        assert_eq!(c, common::grid_dichotomies(&arch, &samples, 0.25) as u128);
    }
}

#[test]
fn vc_never_exceeds_circuit_bound() {
    for seed in 0..15 {
        let m = 2 + (seed as usize % 2);
        let arch = random_architecture(m, 3, seed);
        let vc = vc_by_enumeration(&arch, 4).unwrap();
        assert!(vc as f64 <= circuit_vc_upper(m).unwrap());
    }
}

#[test]
fn subset_budget_guard() {
    let arch = random_architecture(1, 12, 1);
    let err = vc_by_enumeration(&arch, 3);
    assert!(matches!(err, Err(neuroram::Error::Budget { .. })), "{err:?}");
}
