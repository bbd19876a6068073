//! Synchronous stochastic dynamics.
//!
//! In round `t` every unclamped non-input neuron `u` computes the exact integer
//! potential `sum_v w(v, u) * v^(t-1) - b(u)` and fires independently with
//! probability `1 / (1 + exp(-pot / lambda))`. Clamped inputs copy their clamp bit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::model::{Network, NeuronId, NeuronKind, Temperature};
use crate::rng::{unit_closed_open, Streams};

/// `|pot / lambda|` beyond which the sigmoid is returned as exactly 0 or 1.
pub const SATURATION: i64 = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundState {
    pub round: u64,
    pub fired: Vec<bool>,
}

impl RoundState {
    pub fn silent(round: u64, len: usize) -> Self {
        Self {
            round,
            fired: vec![false; len],
        }
    }

    #[inline]
    pub fn get(&self, id: NeuronId) -> bool {
        self.fired[id.0]
    }

    pub fn pattern(&self, ids: &[NeuronId]) -> Vec<bool> {
        ids.iter().map(|&id| self.get(id)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Trace {
    states: Vec<RoundState>,
}

impl Trace {
    pub fn states(&self) -> &[RoundState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, round: usize) -> &RoundState {
        &self.states[round]
    }

    pub fn last(&self) -> &RoundState {
        self.states.last().expect("trace holds at least round 0")
    }

    #[inline]
    pub fn fired(&self, round: usize, id: NeuronId) -> bool {
        self.states[round].get(id)
    }

    /// Rounds in which `id` fired.
    pub fn spikes(&self, id: NeuronId) -> Vec<usize> {
        (0..self.states.len()).filter(|&t| self.fired(t, id)).collect()
    }

    pub(crate) fn push(&mut self, s: RoundState) {
        debug_assert_eq!(s.round as usize, self.states.len());
        self.states.push(s);
    }
}

/// Input neurons held at fixed bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClampSpec {
    bits: Vec<(NeuronId, bool)>,
}

impl ClampSpec {
    pub fn new(net: &Network, bits: Vec<(NeuronId, bool)>) -> Result<Self> {
        for (id, _) in &bits {
            if id.0 >= net.len() || net.neuron(*id).kind != NeuronKind::Input {
                return Err(Error::Contract(format!("{id} is not an input neuron")));
            }
        }
        Ok(Self { bits })
    }

    /// Pairs `ids[i]` with `bits[i]`.
    pub fn zip(net: &Network, ids: &[NeuronId], bits: &[bool]) -> Result<Self> {
        if ids.len() != bits.len() {
            return Err(Error::InvalidParameter(format!(
                "{} clamp bits for {} neurons",
                bits.len(),
                ids.len()
            )));
        }
        Self::new(net, ids.iter().copied().zip(bits.iter().copied()).collect())
    }

    pub fn none() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn bits(&self) -> &[(NeuronId, bool)] {
        &self.bits
    }

    pub fn merge(mut self, other: &ClampSpec) -> Self {
        self.bits.extend_from_slice(&other.bits);
        self
    }

    fn dense(&self, len: usize) -> Vec<Option<bool>> {
        let mut out = vec![None; len];
        for (id, b) in &self.bits {
            out[id.0] = Some(*b);
        }
        out
    }
}

/// Exact potential of non-input neuron `u` given the previous round.
pub fn potential(net: &Network, prev: &RoundState, u: NeuronId) -> Result<BigInt> {
    let n = net.neuron(u);
    if n.kind == NeuronKind::Input {
        return Err(Error::Contract(format!("{} is an input neuron", n.name)));
    }
    Ok(raw_potential(net, &prev.fired, u))
}

fn raw_potential(net: &Network, fired: &[bool], u: NeuronId) -> BigInt {
    let sum: BigInt = net
        .incoming(u)
        .iter()
        .filter(|(pre, _)| fired[pre.0])
        .map(|(_, w)| w.clone())
        .sum();
    sum - &net.neuron(u).bias
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Firing probability for an exact potential. Saturates to 0/1 when
/// `|pot / lambda| > 40`.
pub fn firing_probability(pot: &BigInt, lambda: Temperature) -> f64 {
    if pot.is_zero() {
        return 0.5;
    }
    let num = pot * BigInt::from(lambda.denom());
    let den = BigInt::from(lambda.numer());
    let limit = &den * SATURATION;
    if num > limit {
        1.0
    } else if num < -limit {
        0.0
    } else {
        let x = BigRational::new(num, den).to_f64().unwrap_or(0.0);
        sigmoid(x)
    }
}

#[inline]
pub(crate) fn firing_probability_small(pot: i64, lambda: Temperature) -> f64 {
    if pot == 0 {
        return 0.5;
    }
    let num = pot as i128 * lambda.denom() as i128;
    let den = lambda.numer() as i128;
    let limit = den * SATURATION as i128;
    if num > limit {
        1.0
    } else if num < -limit {
        0.0
    } else {
        sigmoid(num as f64 / den as f64)
    }
}

// Dense i64 kernel, used when every potential provably fits.
#[derive(Clone, Debug)]
struct SmallKernel {
    incoming: Vec<Vec<(u32, i64)>>,
    bias: Vec<i64>,
}

impl SmallKernel {
    fn try_new(net: &Network) -> Option<Self> {
        let bound = BigInt::from(i64::MAX / 4);
        let mut incoming = Vec::with_capacity(net.len());
        let mut bias = Vec::with_capacity(net.len());
        for n in net.neurons() {
            let list = net.incoming(n.id);
            let total: BigInt = list.iter().map(|(_, w)| w.abs()).sum::<BigInt>() + n.bias.abs();
            if total > bound {
                return None;
            }
            incoming.push(
                list.iter()
                    .map(|(pre, w)| (pre.0 as u32, w.to_i64().expect("bounded")))
                    .collect(),
            );
            bias.push(n.bias.to_i64().expect("bounded"));
        }
        Some(Self { incoming, bias })
    }

    #[inline]
    fn potential(&self, fired: &[bool], u: usize) -> i64 {
        let mut acc = -self.bias[u];
        for &(pre, w) in &self.incoming[u] {
            if fired[pre as usize] {
                acc += w;
            }
        }
        acc
    }
}

/// Precompiled view of a network for repeated simulation. Immutable and
/// shareable across threads.
#[derive(Clone, Debug)]
pub struct Simulator<'a> {
    net: &'a Network,
    small: Option<SmallKernel>,
}

impl<'a> Simulator<'a> {
    pub fn new(net: &'a Network) -> Self {
        Self {
            net,
            small: SmallKernel::try_new(net),
        }
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    /// Whether potentials are evaluated on the machine-integer fast path.
    pub fn uses_fast_path(&self) -> bool {
        self.small.is_some()
    }

    fn probability(&self, fired: &[bool], u: usize) -> f64 {
        let lambda = self.net.lambda();
        match &self.small {
            Some(k) => firing_probability_small(k.potential(fired, u), lambda),
            None => firing_probability(&raw_potential(self.net, fired, NeuronId(u)), lambda),
        }
    }

    fn step_dense(
        &self,
        prev: &[bool],
        next: &mut [bool],
        clamps: &[Option<bool>],
        rng: &mut impl RngCore,
    ) {
        for u in 0..prev.len() {
            // One draw per neuron keeps neuron u at a fixed stream position.
            let draw = unit_closed_open(rng);
            next[u] = match clamps[u] {
                Some(b) => b,
                None => draw < self.probability(prev, u),
            };
        }
    }

    /// One synchronous round: `prev` is round `t - 1`, the result is round `t`.
    pub fn step(&self, prev: &RoundState, clamps: &ClampSpec, streams: &Streams) -> RoundState {
        let round = prev.round + 1;
        let mut next = vec![false; prev.fired.len()];
        let mut rng = streams.round(round);
        self.step_dense(&prev.fired, &mut next, &clamps.dense(self.net.len()), &mut rng);
        RoundState { round, fired: next }
    }

    /// Round-0 state: inputs at their clamp bits, everything else silent.
    pub fn initial(&self, clamps: &ClampSpec) -> RoundState {
        let mut s = RoundState::silent(0, self.net.len());
        for (id, b) in clamps.bits() {
            s.fired[id.0] = *b;
        }
        s
    }

    /// Runs `rounds` steps with a fixed clamp set.
    pub fn run(&self, clamps: &ClampSpec, rounds: usize, seed: u64) -> Trace {
        self.run_schedule(rounds, seed, |_| clamps)
    }

    /// Runs `rounds` steps; `schedule(t)` supplies the clamps for round `t`.
    pub fn run_schedule<'c>(
        &self,
        rounds: usize,
        seed: u64,
        schedule: impl Fn(u64) -> &'c ClampSpec,
    ) -> Trace {
        let streams = Streams::new(seed);
        let mut trace = Trace::default();
        trace.push(self.initial(schedule(0)));
        let len = self.net.len();
        for t in 1..=rounds as u64 {
            let dense = schedule(t).dense(len);
            let mut next = vec![false; len];
            let mut rng = streams.round(t);
            self.step_dense(&trace.last().fired, &mut next, &dense, &mut rng);
            trace.push(RoundState {
                round: t,
                fired: next,
            });
        }
        trace
    }

    /// Final state only, without storing the trace.
    pub fn run_final(&self, clamps: &ClampSpec, rounds: usize, seed: u64) -> RoundState {
        let streams = Streams::new(seed);
        let dense = clamps.dense(self.net.len());
        let mut cur = self.initial(clamps).fired;
        let mut next = vec![false; cur.len()];
        for t in 1..=rounds as u64 {
            let mut rng = streams.round(t);
            self.step_dense(&cur, &mut next, &dense, &mut rng);
            std::mem::swap(&mut cur, &mut next);
        }
        RoundState {
            round: rounds as u64,
            fired: cur,
        }
    }
}

/// One round of dynamics for `net`.
pub fn step(net: &Network, prev: &RoundState, clamps: &ClampSpec, streams: &Streams) -> RoundState {
    Simulator::new(net).step(prev, clamps, streams)
}

/// Trace of rounds `0..=rounds` for a fixed clamp set.
pub fn run(net: &Network, clamps: &ClampSpec, rounds: usize, seed: u64) -> Trace {
    Simulator::new(net).run(clamps, rounds, seed)
}
