//! Monte-Carlo comparison of a recurrent network against sampled circuits.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::threshold::sample_and_eval;
use super::unroll::{unroll, FeedforwardNetwork};
use crate::dynamics::{ClampSpec, Simulator};
use crate::error::{invalid, Result};
use crate::model::{Network, NeuronId};
use crate::rng::derive_seed;

const SNN_DOMAIN: u64 = 1;
const CIRCUIT_DOMAIN: u64 = 2;
const FEEDFORWARD_DOMAIN: u64 = 3;

pub const MIN_TRIALS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub t: usize,
    pub trials: u64,
    pub p_snn: f64,
    pub p_circuit: f64,
    pub delta: f64,
    /// Four pooled binomial standard deviations of the difference.
    pub threshold: f64,
    pub within_threshold: bool,
}

impl EquivalenceReport {
    fn new(t: usize, trials: u64, hits_a: u64, hits_b: u64) -> Self {
        let n = trials as f64;
        let (pa, pb) = (hits_a as f64 / n, hits_b as f64 / n);
        let pooled = (pa + pb) / 2.0;
        let threshold = 4.0 * (pooled * (1.0 - pooled) * 2.0 / n).sqrt();
        let delta = (pa - pb).abs();
        Self {
            t,
            trials,
            p_snn: pa,
            p_circuit: pb,
            delta,
            threshold,
            within_threshold: delta <= threshold,
        }
    }
}

fn output_of(net: &Network) -> Result<NeuronId> {
    match net.outputs()[..] {
        [z] => Ok(z),
        _ => Err(invalid("network must have exactly one output")),
    }
}

/// `Pr[z^t = 1]` of the recurrent network, from `trials` runs.
pub fn recurrent_hits(net: &Network, input: &[bool], t: usize, trials: u64, seed: u64) -> Result<u64> {
    let z = output_of(net)?;
    let clamps = ClampSpec::zip(net, &net.inputs(), input)?;
    let sim = Simulator::new(net);
    Ok((0..trials)
        .into_par_iter()
        .filter(|&i| sim.run_final(&clamps, t, derive_seed(seed, SNN_DOMAIN, i)).get(z))
        .count() as u64)
}

/// Same quantity from stochastic forward passes over the unrolled network.
pub fn feedforward_hits(ff: &FeedforwardNetwork, input: &[bool], trials: u64, seed: u64) -> Result<u64> {
    (0..trials)
        .into_par_iter()
        .map(|i| ff.sample(input, derive_seed(seed, FEEDFORWARD_DOMAIN, i)).map(u64::from))
        .sum()
}

/// Same quantity with a fresh threshold circuit per trial.
pub fn circuit_hits(ff: &FeedforwardNetwork, input: &[bool], trials: u64, seed: u64) -> Result<u64> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            sample_and_eval(ff, input, derive_seed(seed, CIRCUIT_DOMAIN, i))
                .map(|s| u64::from(s[ff.output.0]))
        })
        .sum()
}

/// Recurrent network against the unrolled stochastic network.
pub fn unrolling_equivalence(
    net: &Network,
    input: &[bool],
    t: usize,
    trials: u64,
    seed: u64,
) -> Result<EquivalenceReport> {
    let ff = unroll(net, t)?;
    let a = recurrent_hits(net, input, t, trials, seed)?;
    let b = feedforward_hits(&ff, input, trials, seed)?;
    Ok(EquivalenceReport::new(t, trials, a, b))
}

/// Recurrent network against freshly sampled deterministic circuits.
pub fn distribution_equivalence(
    net: &Network,
    input: &[bool],
    t: usize,
    trials: u64,
    seed: u64,
) -> Result<EquivalenceReport> {
    if trials < MIN_TRIALS {
        return Err(invalid(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let ff = unroll(net, t)?;
    let a = recurrent_hits(net, input, t, trials, seed)?;
    let b = circuit_hits(&ff, input, trials, seed)?;
    Ok(EquivalenceReport::new(t, trials, a, b))
}

fn key(bits: impl Iterator<Item = bool>) -> u64 {
    bits.enumerate().fold(0, |acc, (i, b)| acc | (u64::from(b) << i))
}

fn tv(a: &HashMap<u64, u64>, b: &HashMap<u64, u64>, n: u64) -> f64 {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .map(|k| {
            let pa = *a.get(k).unwrap_or(&0) as f64;
            let pb = *b.get(k).unwrap_or(&0) as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
        / (2.0 * n as f64)
}

fn histogram(samples: impl ParallelIterator<Item = u64>) -> HashMap<u64, u64> {
    samples
        .fold(HashMap::new, |mut h, k| {
            *h.entry(k).or_insert(0) += 1;
            h
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

/// Total-variation distance between the joint law of (all non-input neurons
/// at round `t - 1`, output at round `t`) in the recurrent network and the
/// joint law of (last layer, output) in sampled circuits. Needs at most 63
/// non-input neurons.
pub fn joint_law_tv(net: &Network, input: &[bool], t: usize, trials: u64, seed: u64) -> Result<f64> {
    let ff = unroll(net, t)?;
    let body: Vec<NeuronId> = net
        .neurons()
        .iter()
        .filter(|n| n.kind != crate::model::NeuronKind::Input)
        .map(|n| n.id)
        .collect();
    if body.len() >= 64 {
        return Err(invalid("joint law comparison supports at most 63 neurons"));
    }
    let z = output_of(net)?;
    let clamps = ClampSpec::zip(net, &net.inputs(), input)?;
    let sim = Simulator::new(net);
    let snn = histogram((0..trials).into_par_iter().map(|i| {
        let tr = sim.run(&clamps, t, derive_seed(seed, SNN_DOMAIN, i));
        let prev = tr.state(t - 1);
        key(body.iter().map(|&u| prev.get(u)).chain([tr.fired(t, z)]))
    }));
    let last = ff.layers.last().expect("t >= 2").clone();
    let circ = histogram((0..trials).into_par_iter().map(|i| {
        let s = sample_and_eval(&ff, input, derive_seed(seed, CIRCUIT_DOMAIN, i)).expect("checked");
        key(last.iter().map(|u| s[u.0]).chain([s[ff.output.0]]))
    }));
    Ok(tv(&snn, &circ, trials))
}
