//! Deterministic threshold circuits with logistic-sampled thresholds.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::unroll::{exact_f64, FeedforwardNetwork};
use crate::error::{invalid, Result};
use crate::model::NeuronId;
use crate::rng::{unit_open, Streams, BIAS_STREAM};

/// Threshold of one gate, `eta = base + offset`. Keeping the integer part
/// separate lets huge biases compare exactly against integer sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    #[serde(with = "crate::io::bigint_string")]
    pub base: BigInt,
    pub offset: f64,
}

impl Threshold {
    pub fn eta(&self) -> f64 {
        self.base.to_f64().unwrap_or(f64::NAN) + self.offset
    }

    /// Fires iff `sum - eta >= 0`.
    pub fn fires(&self, sum: &BigInt) -> bool {
        let diff = sum - &self.base;
        let d = exact_f64(&diff).unwrap_or_else(|| diff.to_f64().unwrap_or(0.0));
        d >= self.offset
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdCircuit {
    pub ff: FeedforwardNetwork,
    /// Indexed by neuron id; `None` for inputs.
    pub thresholds: Vec<Option<Threshold>>,
}

impl ThresholdCircuit {
    /// Circuit with explicit real thresholds for the gates, in `ff.gates()` order.
    pub fn with_thresholds(ff: FeedforwardNetwork, etas: &[f64]) -> Result<Self> {
        let gates: Vec<NeuronId> = ff.gates().collect();
        if gates.len() != etas.len() {
            return Err(invalid(format!(
                "expected {} thresholds, got {}",
                gates.len(),
                etas.len()
            )));
        }
        let mut thresholds = vec![None; ff.net.len()];
        for (g, &eta) in gates.iter().zip(etas) {
            thresholds[g.0] = Some(Threshold {
                base: BigInt::zero(),
                offset: eta,
            });
        }
        Ok(Self { ff, thresholds })
    }

    pub fn threshold(&self, g: NeuronId) -> Option<&Threshold> {
        self.thresholds[g.0].as_ref()
    }

    /// Full evaluation; entry `u` is the value of neuron `u`.
    pub fn eval_state(&self, bits: &[bool]) -> Result<Vec<bool>> {
        let ff = &self.ff;
        if bits.len() != ff.inputs.len() {
            return Err(invalid(format!(
                "expected {} input bits, got {}",
                ff.inputs.len(),
                bits.len()
            )));
        }
        let mut state = vec![false; ff.net.len()];
        for (&i, &b) in ff.inputs.iter().zip(bits) {
            state[i.0] = b;
        }
        for g in ff.gates() {
            let sum: BigInt = ff
                .net
                .incoming(g)
                .iter()
                .filter(|(pre, _)| state[pre.0])
                .map(|(_, w)| w)
                .sum();
            state[g.0] = self.thresholds[g.0]
                .as_ref()
                .expect("every gate has a threshold")
                .fires(&sum);
        }
        Ok(state)
    }
}

/// Draws `eta = b + lambda ln(p / (1 - p))`, `p` uniform in `(0, 1)`, for every gate.
pub fn sample_threshold_circuit(ff: &FeedforwardNetwork, seed: u64) -> ThresholdCircuit {
    let mut rng = Streams::new(seed).stream(BIAS_STREAM);
    let lambda = ff.lambda().as_f64();
    let mut thresholds = vec![None; ff.net.len()];
    for g in ff.gates() {
        let p = unit_open(&mut rng);
        thresholds[g.0] = Some(Threshold {
            base: ff.net.neuron(g).bias.clone(),
            offset: lambda * (p / (1.0 - p)).ln(),
        });
    }
    ThresholdCircuit {
        ff: ff.clone(),
        thresholds,
    }
}

pub fn eval_threshold_circuit(tc: &ThresholdCircuit, bits: &[bool]) -> Result<bool> {
    Ok(tc.eval_state(bits)?[tc.ff.output.0])
}

/// Samples thresholds and evaluates in one pass, without cloning the network.
/// Draws the same thresholds as [`sample_threshold_circuit`] for the same seed.
pub fn sample_and_eval(ff: &FeedforwardNetwork, bits: &[bool], seed: u64) -> Result<Vec<bool>> {
    let mut rng = Streams::new(seed).stream(BIAS_STREAM);
    let lambda = ff.lambda().as_f64();
    if bits.len() != ff.inputs.len() {
        return Err(invalid("input length mismatch"));
    }
    let mut state = vec![false; ff.net.len()];
    for (&i, &b) in ff.inputs.iter().zip(bits) {
        state[i.0] = b;
    }
    for g in ff.gates() {
        let p = unit_open(&mut rng);
        let t = Threshold {
            base: ff.net.neuron(g).bias.clone(),
            offset: lambda * (p / (1.0 - p)).ln(),
        };
        let sum: BigInt = ff
            .net
            .incoming(g)
            .iter()
            .filter(|(pre, _)| state[pre.0])
            .map(|(_, w)| w)
            .sum();
        state[g.0] = t.fires(&sum);
    }
    Ok(state)
}
