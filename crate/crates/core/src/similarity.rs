//! Approximate equality testing with `K` neuro-RAM pairs.
//!
//! Each pair reads both inputs at one random position. The position comes
//! from a group of index neurons that fire at random in round 1 and are then
//! frozen by the lock inhibitor `g`. The output fires when some pair disagrees.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::bits::{dec, hamming};
use crate::dynamics::{ClampSpec, Simulator, Trace};
use crate::error::{invalid, Result};
use crate::model::{Network, NetworkBuilder, NeuronId, NeuronKind, Temperature};
use crate::neuroram::{attach, geometry, NeuroRamLayout, NeuroRamOptions};
use crate::rng::derive_seed;

/// `ceil(c ln n / eps)`.
pub fn sample_count(n: usize, eps: f64, c: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(c >= 1.0 && c.is_finite()) {
        return Err(invalid(format!("c must be at least 1, got {c}")));
    }
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    Ok((c * (n as f64).ln() / eps).ceil() as usize)
}

/// Probability that `k` uniform positions all miss a set of density `eps`,
/// and the target `n^-c`.
pub fn miss_bound(n: usize, eps: f64, c: f64, k: usize) -> (f64, f64) {
    ((1.0 - eps).powi(k as i32), (n as f64).powf(-c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityLayout {
    pub n: usize,
    pub eps: f64,
    pub c: f64,
    pub k: usize,
    pub x1: Vec<NeuronId>,
    pub x2: Vec<NeuronId>,
    /// Index neuron groups, one per pair.
    pub index: Vec<Vec<NeuronId>>,
    pub pairs: Vec<(NeuroRamLayout, NeuroRamLayout)>,
    pub lock: NeuronId,
    pub f1: Vec<NeuronId>,
    pub f2: Vec<NeuronId>,
    pub z: NeuronId,
}

impl SimilarityLayout {
    /// Pair outputs are final at `5 sqrt n + 1`; two comparator layers follow.
    pub fn readout_round(&self) -> usize {
        self.pairs[0].0.readout_round() + 2
    }

    /// Round at which the index neurons hold their locked values.
    pub fn lock_round(&self) -> usize {
        2
    }

    /// Position addressed by group `k` in round `t`.
    pub fn position(&self, trace: &Trace, k: usize, t: usize) -> usize {
        let bits = trace.state(t).pattern(&self.index[k]);
        self.pairs[k].0.index_of(&bits)
    }
}

/// Builds the tester for `n = 2^(2m)` with `K = sample_count(n, eps, c)` pairs.
pub fn build_similarity(
    n: usize,
    eps: f64,
    c: f64,
    lambda: Temperature,
) -> Result<(Network, SimilarityLayout)> {
    let (_, log_n) = geometry(n)?;
    let k = sample_count(n, eps, c)?;
    let mut b = NetworkBuilder::new();
    let x1: Vec<_> = (0..n).map(|i| b.input(format!("x1_{i}"))).collect();
    let x2: Vec<_> = (0..n).map(|i| b.input(format!("x2_{i}"))).collect();
    for &id in &x1 {
        b.role("x1", id);
    }
    for &id in &x2 {
        b.role("x2", id);
    }

    let lock = b.inhibitory("g", 1);
    b.role("lock", lock);
    for &xi in x1.iter().chain(&x2) {
        b.connect(xi, lock, 2);
    }

    let opts = NeuroRamOptions {
        with_reset: false,
        delayed_index: true,
    };
    let mut index = Vec::with_capacity(k);
    let mut pairs = Vec::with_capacity(k);
    let mut f1 = Vec::with_capacity(k);
    let mut f2 = Vec::with_capacity(k);
    for g in 0..k {
        let y: Vec<_> = (0..log_n)
            .map(|j| {
                let id = b.excitatory(format!("y{g}_{j}"), 0);
                b.connect(id, id, 2);
                b.connect(lock, id, -1);
                b.role("index", id);
                id
            })
            .collect();
        let s1 = attach(&mut b, &x1, &y, &format!("s1.{g}."), opts)?;
        let s2 = attach(&mut b, &x2, &y, &format!("s2.{g}."), opts)?;
        b.role("pair_output", s1.z);
        b.role("pair_output", s2.z);

        let any = b.excitatory(format!("f1_{g}"), 1);
        let both = b.inhibitory(format!("f2_{g}"), 3);
        for out in [s1.z, s2.z] {
            b.connect(out, any, 2);
            b.connect(out, both, 2);
        }
        b.role("f1", any);
        b.role("f2", both);
        index.push(y);
        pairs.push((s1, s2));
        f1.push(any);
        f2.push(both);
    }
    let z = b.excitatory("z", 1);
    b.set_kind(z, NeuronKind::Output);
    b.role("z", z);
    for g in 0..k {
        b.connect(f1[g], z, 2);
        b.connect(f2[g], z, -2);
    }
    let layout = SimilarityLayout {
        n,
        eps,
        c,
        k,
        x1,
        x2,
        index,
        pairs,
        lock,
        f1,
        f2,
        z,
    };
    Ok((b.build(lambda), layout))
}

/// A built tester, ready for repeated simulation.
#[derive(Clone, Debug)]
pub struct Similarity {
    pub net: Network,
    pub layout: SimilarityLayout,
}

impl Similarity {
    pub fn new(n: usize, eps: f64, c: f64, lambda: Temperature) -> Result<Self> {
        let (net, layout) = build_similarity(n, eps, c, lambda)?;
        Ok(Self { net, layout })
    }

    pub fn clamps(&self, x1: &[bool], x2: &[bool]) -> Result<ClampSpec> {
        if x1.len() != self.layout.n || x2.len() != self.layout.n {
            return Err(invalid(format!(
                "inputs must have {} bits each, got {} and {}",
                self.layout.n,
                x1.len(),
                x2.len()
            )));
        }
        let mut bits = Vec::with_capacity(2 * self.layout.n);
        bits.extend(self.layout.x1.iter().copied().zip(x1.iter().copied()));
        bits.extend(self.layout.x2.iter().copied().zip(x2.iter().copied()));
        ClampSpec::new(&self.net, bits)
    }

    pub fn trace(&self, x1: &[bool], x2: &[bool], rounds: usize, seed: u64) -> Result<Trace> {
        Ok(Simulator::new(&self.net).run(&self.clamps(x1, x2)?, rounds, seed))
    }

    /// Output bit at the readout round.
    pub fn test(&self, sim: &Simulator<'_>, clamps: &ClampSpec, seed: u64) -> bool {
        sim.run_final(clamps, self.layout.readout_round(), seed)
            .get(self.layout.z)
    }

    /// Number of runs, out of `trials`, in which the output fired.
    pub fn positives(&self, x1: &[bool], x2: &[bool], trials: u64, seed: u64) -> Result<u64> {
        let clamps = self.clamps(x1, x2)?;
        let sim = Simulator::new(&self.net);
        Ok((0..trials)
            .into_par_iter()
            .filter(|&t| self.test(&sim, &clamps, derive_seed(seed, 0, t)))
            .count() as u64)
    }

    /// Copy of the network with the lock inhibitor disconnected from the index neurons.
    pub fn without_lock(&self) -> Network {
        let mut net = self.net.clone();
        for group in &self.layout.index {
            for &y in group {
                net.set_weight(self.layout.lock, y, BigInt::from(0));
            }
        }
        net
    }

    /// Positions held by every index group at the lock round. Only the first
    /// rounds are simulated, so this is cheap to repeat.
    pub fn sampled_positions(&self, x1: &[bool], x2: &[bool], seed: u64) -> Result<Vec<usize>> {
        let t = self.layout.lock_round();
        let trace = self.trace(x1, x2, t, seed)?;
        Ok((0..self.layout.k)
            .map(|k| self.layout.position(&trace, k, t))
            .collect())
    }
}

/// One-shot convenience wrapper.
pub fn test_similarity(
    n: usize,
    eps: f64,
    x1: &[bool],
    x2: &[bool],
    seed: u64,
    c: f64,
    lambda: Temperature,
) -> Result<bool> {
    let s = Similarity::new(n, eps, c, lambda)?;
    let clamps = s.clamps(x1, x2)?;
    Ok(s.test(&Simulator::new(&s.net), &clamps, seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LockOutcome {
    /// The lock inhibitor never fired, so there is nothing to hold.
    Inactive,
    /// Whether every index group kept one pattern from round 2 to the readout.
    Checked(bool),
}

pub fn locked_index_check(trace: &Trace, layout: &SimilarityLayout) -> LockOutcome {
    let end = layout.readout_round().min(trace.len() - 1);
    if !(0..=end).any(|t| trace.fired(t, layout.lock)) {
        return LockOutcome::Inactive;
    }
    let start = layout.lock_round();
    let stable = layout.index.iter().all(|group| {
        let first = trace.state(start).pattern(group);
        (start..=end).all(|t| trace.state(t).pattern(group) == first)
    });
    LockOutcome::Checked(stable)
}

/// Whether the positions hit at least one place where the inputs differ.
pub fn detects(x1: &[bool], x2: &[bool], positions: &[usize]) -> bool {
    positions.iter().any(|&p| x1[p] != x2[p])
}

/// `ham(x1, x2) >= eps n`.
pub fn is_far(x1: &[bool], x2: &[bool], eps: f64) -> bool {
    hamming(x1, x2) as f64 >= eps * x1.len() as f64
}

/// Decodes a group's bits with the neuro-RAM index convention.
pub fn decode_index(bits: &[bool]) -> usize {
    let h = bits.len() / 2;
    (1usize << h) * dec(&bits[..h]) as usize + dec(&bits[h..]) as usize
}
