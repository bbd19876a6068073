//! Neuro-RAM: a recurrent network with O(sqrt n) auxiliary neurons that
//! outputs `X[index(Y)]` after `5 sqrt n` rounds.
//!
//! The data bits are split into `sqrt n` buckets. Bucket `i` is encoded in the
//! potential of a single encoding neuron `e_i` through power-of-two weights.
//! The high half of the index selects a bucket, which boosts exactly one `e_i`
//! past its bias. A clock chain then drives successive decoding: every five
//! rounds one more bit of the selected bucket is read off `e_i`, and feedback
//! neurons cancel it from the potential. When the read position matches the
//! low half of the index, the output fires and latches through its self-loop.
//!
//! Round conventions (offset `o` is 0 for a standalone network, 1 when the
//! index only becomes valid at round 1):
//! - `c_i` fires at round `i + 1 + o` for `i >= 1`;
//! - `e_{sel}` at round `5j + 3 + o` equals bit `j` of the selected bucket;
//! - the output is read at round `5 sqrt n + o`.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::bits::{bin, dec, exact_log2};
use crate::dynamics::{ClampSpec, Simulator, Trace};
use crate::error::{invalid, Error, Result};
use crate::model::{Network, NetworkBuilder, NeuronId, NeuronKind, Temperature};
use crate::rng::derive_seed;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NeuroRamOptions {
    /// Adds the inhibitory reset neuron so windows can be chained.
    pub with_reset: bool,
    /// Start the clock one round late, for indices that settle at round 1.
    pub delayed_index: bool,
}

/// Role map of a built neuro-RAM.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeuroRamLayout {
    pub n: usize,
    pub sqrt_n: usize,
    pub log_n: usize,
    pub offset: usize,
    pub x: Vec<NeuronId>,
    pub y: Vec<NeuronId>,
    /// Fires from round 1 while any data bit is on; lifts the selector biases.
    pub detector: NeuronId,
    /// `(y_{j,1}, y_{j,1'})` for the bucket-selecting index bits.
    pub y1_relays: Vec<(NeuronId, NeuronId)>,
    /// Same for the position-selecting index bits.
    pub y2_relays: Vec<(NeuronId, NeuronId)>,
    pub g: Vec<NeuronId>,
    pub f: Vec<NeuronId>,
    pub e: Vec<NeuronId>,
    /// `c_0 ..= c_{5 sqrt n}`.
    pub clock: Vec<NeuronId>,
    /// `c_1' ..= c_{5 sqrt n - 1}'`; entry `i - 1` holds `c_i'`.
    pub clock_inhibitors: Vec<NeuronId>,
    pub d1: Vec<NeuronId>,
    pub d2: Vec<NeuronId>,
    pub d3: Vec<NeuronId>,
    pub d3_companion: Vec<NeuronId>,
    pub z: NeuronId,
    pub reset: Option<NeuronId>,
}

impl NeuroRamLayout {
    /// Decoding rounds, `5 sqrt n`.
    pub fn rounds(&self) -> usize {
        5 * self.sqrt_n
    }

    pub fn readout_round(&self) -> usize {
        self.rounds() + self.offset
    }

    /// Length of one presentation window when chaining inputs.
    pub fn window(&self) -> usize {
        self.rounds() + 1
    }

    /// Round at which `c_i` fires (for `i >= 1`).
    pub fn clock_round(&self, i: usize) -> usize {
        i + 1 + self.offset
    }

    /// Round at which the selected encoder carries bucket bit `j`.
    pub fn read_round(&self, j: usize) -> usize {
        5 * j + 3 + self.offset
    }

    /// First round from which only the selected encoder may fire.
    pub fn selection_round(&self) -> usize {
        3 + self.offset
    }

    /// Clock tap that gates decoding step `j`.
    pub fn tap(j: usize) -> usize {
        5 * j + 2
    }

    /// Auxiliary neurons, excluding `z` and the index inputs.
    pub fn auxiliary_formula(sqrt_n: usize, log_n: usize, with_reset: bool) -> usize {
        // e, g, f, four decoders per position, clock chain and its inhibitors,
        // two relays per index bit, the detector and the optional reset.
        sqrt_n * 7 + (5 * sqrt_n + 1) + (5 * sqrt_n - 1) + 2 * log_n + 1 + with_reset as usize
    }

    pub fn bucket_bits(&self) -> usize {
        self.log_n / 2
    }

    /// `sqrt n * dec(Y1) + dec(Y2)`, where `Y1` is the first half of the index.
    pub fn index_of(&self, y: &[bool]) -> usize {
        let h = self.bucket_bits();
        self.sqrt_n * dec(&y[..h]) as usize + dec(&y[h..]) as usize
    }

    /// Index bits addressing global position `k`.
    pub fn index_bits(&self, k: usize) -> Result<Vec<bool>> {
        if k >= self.n {
            return Err(invalid(format!("index {k} out of range for n = {}", self.n)));
        }
        let h = self.bucket_bits();
        let mut y = bin((k / self.sqrt_n) as u64, h)?;
        y.extend(bin((k % self.sqrt_n) as u64, h)?);
        Ok(y)
    }

    /// All neurons belonging to this instance, in role order.
    pub fn all_neurons(&self) -> Vec<NeuronId> {
        let mut v = vec![self.detector];
        for (a, b) in self.y1_relays.iter().chain(&self.y2_relays) {
            v.push(*a);
            v.push(*b);
        }
        for list in [
            &self.g,
            &self.f,
            &self.e,
            &self.clock,
            &self.clock_inhibitors,
            &self.d1,
            &self.d2,
            &self.d3,
            &self.d3_companion,
        ] {
            v.extend_from_slice(list);
        }
        v.push(self.z);
        v.extend(self.reset);
        v
    }
}

/// Geometry `(sqrt n, log n)` for `n = 2^(2m)`, `m >= 1`.
pub fn geometry(n: usize) -> Result<(usize, usize)> {
    match exact_log2(n) {
        Some(log) if log >= 2 && log % 2 == 0 => Ok((1usize << (log / 2), log as usize)),
        _ => Err(invalid(format!("n = {n} is not of the form 2^(2m) with m >= 1"))),
    }
}

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

/// Adds a neuro-RAM reading data bits `x` at index bits `y` to `b`.
/// The `x` and `y` neurons must already exist and be excitatory; the new
/// output `z` is auxiliary until the caller promotes it.
pub fn attach(
    b: &mut NetworkBuilder,
    x: &[NeuronId],
    y: &[NeuronId],
    prefix: &str,
    opts: NeuroRamOptions,
) -> Result<NeuroRamLayout> {
    let n = x.len();
    let (sqrt_n, log_n) = geometry(n)?;
    if y.len() != log_n {
        return Err(invalid(format!("expected {log_n} index neurons, got {}", y.len())));
    }
    let half = log_n / 2;
    let ticks = 5 * sqrt_n;
    let name = |s: String| format!("{prefix}{s}");

    let detector = b.excitatory(name("detector".into()), 1);
    for &xi in x {
        b.connect(xi, detector, 2);
    }

    // Index relays: both copies fire one round after their index bit.
    let relay_pairs = |b: &mut NetworkBuilder, bits: &[NeuronId], tag: &str| {
        bits.iter()
            .enumerate()
            .map(|(j, &yj)| {
                let on = b.excitatory(name(format!("{tag}_{j}")), 1);
                let inh = b.inhibitory(name(format!("{tag}_{j}'")), 1);
                b.connect(yj, on, 2);
                b.connect(yj, inh, 2);
                (on, inh)
            })
            .collect::<Vec<_>>()
    };
    let y1_relays = relay_pairs(b, &y[..half], "y1");
    let y2_relays = relay_pairs(b, &y[half..], "y2");

    // Selector for pattern `i`: potential +1 exactly when the relays show bin(i).
    let selector = |b: &mut NetworkBuilder, label: String, i: usize, relays: &[(NeuronId, NeuronId)]| {
        let pattern = bin(i as u64, relays.len()).expect("i < sqrt n");
        let ones = pattern.iter().filter(|&&p| p).count();
        let s = b.excitatory(label, 2 * ones + 1);
        b.connect(detector, s, 2);
        for (&(on, inh), &bit) in relays.iter().zip(&pattern) {
            if bit {
                b.connect(on, s, 2);
            } else {
                b.connect(inh, s, -2);
            }
        }
        s
    };
    let g: Vec<_> = (0..sqrt_n)
        .map(|i| selector(b, name(format!("g_{i}")), i, &y1_relays))
        .collect();
    let f: Vec<_> = (0..sqrt_n)
        .map(|j| selector(b, name(format!("f_{j}")), j, &y2_relays))
        .collect();

    let e_bias: BigInt = pow2(sqrt_n + 2) + pow2(sqrt_n) - 1;
    let e: Vec<_> = (0..sqrt_n)
        .map(|i| {
            let ei = b.excitatory(name(format!("e_{i}")), e_bias.clone());
            for j in 0..sqrt_n {
                b.connect(x[i * sqrt_n + j], ei, pow2(sqrt_n - j));
            }
            b.connect(g[i], ei, pow2(sqrt_n + 2));
            ei
        })
        .collect();

    // Clock chain.
    let mut clock = Vec::with_capacity(ticks + 1);
    let c0 = b.excitatory(name("c_0".into()), 1);
    if opts.delayed_index {
        b.connect(detector, c0, 2);
    } else {
        for &xi in x {
            b.connect(xi, c0, 2);
        }
    }
    clock.push(c0);
    let mut clock_inhibitors = Vec::with_capacity(ticks - 1);
    let inhibit_c0 = BigInt::from(-2) * n;
    for i in 1..=ticks {
        let ci = b.excitatory(name(format!("c_{i}")), 1);
        b.connect(clock[i - 1], ci, 2);
        clock.push(ci);
        if i < ticks {
            let ci_inh = b.inhibitory(name(format!("c_{i}'")), 1);
            b.connect(clock[i - 1], ci_inh, 2);
            b.connect(ci_inh, c0, inhibit_c0.clone());
            clock_inhibitors.push(ci_inh);
        }
    }
    b.connect(clock_inhibitors[0], clock[1], -2);

    let z = b.excitatory(name("z".into()), 1);
    b.connect(z, z, 2);

    let (mut d1, mut d2, mut d3, mut d3c) = (vec![], vec![], vec![], vec![]);
    let sqrt_big = BigInt::from(sqrt_n);
    for j in 0..sqrt_n {
        let tap = clock[NeuroRamLayout::tap(j)];

        let trig = b.excitatory(name(format!("d_{j}_1")), 2 * &sqrt_big + 3);
        for &ei in &e {
            b.connect(ei, trig, 2);
        }
        b.connect(f[j], trig, 2);
        b.connect(tap, trig, 2 * &sqrt_big);
        b.connect(trig, z, 2);

        let excite = b.excitatory(name(format!("d_{j}_2")), 1);
        b.connect(tap, excite, 2);
        b.connect(excite, excite, 2);

        let inhibit = b.inhibitory(name(format!("d_{j}_3")), 3);
        let companion = b.excitatory(name(format!("d_{j}_3'")), 3);
        for &target in &[inhibit, companion] {
            for &ei in &e {
                b.connect(ei, target, 2);
            }
            b.connect(tap, target, 2);
        }
        b.connect(companion, companion, 4);
        b.connect(companion, inhibit, 4);

        for &ei in &e {
            b.connect(excite, ei, pow2(sqrt_n - j - 1));
            b.connect(inhibit, ei, -pow2(sqrt_n - j));
        }
        d1.push(trig);
        d2.push(excite);
        d3.push(inhibit);
        d3c.push(companion);
    }

    let reset = opts.with_reset.then(|| {
        let r = b.inhibitory(name("r".into()), 1);
        b.connect(clock[ticks - 2], r, 2);
        let targets: Vec<_> = d1
            .iter()
            .chain(&d2)
            .chain(&d3)
            .chain(&d3c)
            .copied()
            .chain(std::iter::once(z))
            .collect();
        for t in targets {
            let w = -2 * b.excitatory_in_weight(t);
            b.connect(r, t, w);
        }
        r
    });

    let layout = NeuroRamLayout {
        n,
        sqrt_n,
        log_n,
        offset: opts.delayed_index as usize,
        x: x.to_vec(),
        y: y.to_vec(),
        detector,
        y1_relays,
        y2_relays,
        g,
        f,
        e,
        clock,
        clock_inhibitors,
        d1,
        d2,
        d3,
        d3_companion: d3c,
        z,
        reset,
    };
    record_roles(b, &layout, prefix);
    Ok(layout)
}

fn record_roles(b: &mut NetworkBuilder, l: &NeuroRamLayout, prefix: &str) {
    let mut put = |role: &str, ids: &[NeuronId]| {
        for &id in ids {
            b.role(format!("{prefix}{role}"), id);
        }
    };
    put("detector", &[l.detector]);
    let (on1, inh1): (Vec<_>, Vec<_>) = l.y1_relays.iter().copied().unzip();
    let (on2, inh2): (Vec<_>, Vec<_>) = l.y2_relays.iter().copied().unzip();
    put("y1_relay", &on1);
    put("y1_relay_inhibitor", &inh1);
    put("y2_relay", &on2);
    put("y2_relay_inhibitor", &inh2);
    put("g", &l.g);
    put("f", &l.f);
    put("e", &l.e);
    put("clock", &l.clock);
    put("clock_inhibitor", &l.clock_inhibitors);
    put("d1", &l.d1);
    put("d2", &l.d2);
    put("d3", &l.d3);
    put("d3_companion", &l.d3_companion);
    put("z", &[l.z]);
    if let Some(r) = l.reset {
        put("reset", &[r]);
    }
}

/// Standalone neuro-RAM with inputs `x_0..x_{n-1}`, `y_0..y_{log n - 1}`.
pub fn build_neuro_ram(
    n: usize,
    with_reset: bool,
    lambda: Temperature,
) -> Result<(Network, NeuroRamLayout)> {
    let (_, log_n) = geometry(n)?;
    let mut b = NetworkBuilder::new();
    let x: Vec<_> = (0..n).map(|i| b.input(format!("x_{i}"))).collect();
    let y: Vec<_> = (0..log_n).map(|j| b.input(format!("y_{j}"))).collect();
    for &id in &x {
        b.role("x", id);
    }
    for &id in &y {
        b.role("y", id);
    }
    let opts = NeuroRamOptions {
        with_reset,
        delayed_index: false,
    };
    let layout = attach(&mut b, &x, &y, "", opts)?;
    b.set_kind(layout.z, NeuronKind::Output);
    Ok((b.build(lambda), layout))
}

/// Largest total of positive incoming weights into any encoder, ignoring its selector.
pub fn check_weight_fact(net: &Network, layout: &NeuroRamLayout) -> bool {
    let cap = pow2(layout.sqrt_n + 2);
    layout.e.iter().zip(&layout.g).all(|(&ei, &gi)| {
        let total: BigInt = net
            .incoming(ei)
            .iter()
            .filter(|(pre, w)| *pre != gi && w.is_positive())
            .map(|(_, w)| w.clone())
            .sum();
        total <= cap
    })
}

/// Potential a bucket contributes to its encoder, `sum_j bucket_j 2^(len - j)`.
/// Checked against `2 dec(reverse(bucket))`.
pub fn expected_encoding_potential(bucket: &[bool]) -> Result<BigInt> {
    let len = bucket.len();
    let direct: BigInt = bucket
        .iter()
        .enumerate()
        .filter(|(_, &bit)| bit)
        .map(|(j, _)| pow2(len - j))
        .sum();
    let reversed: BigInt = bucket
        .iter()
        .rev()
        .enumerate()
        .filter(|(_, &bit)| bit)
        .map(|(i, _)| pow2(i))
        .sum();
    if direct != 2 * reversed {
        return Err(Error::Contract("encoding identity failed".into()));
    }
    Ok(direct)
}

/// Data bits plus index bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexInstance {
    pub x: Vec<bool>,
    pub y: Vec<bool>,
}

impl IndexInstance {
    pub fn new(x: Vec<bool>, y: Vec<bool>) -> Result<Self> {
        let (_, log_n) = geometry(x.len())?;
        if y.len() != log_n {
            return Err(invalid(format!(
                "index has {} bits, expected {log_n}",
                y.len()
            )));
        }
        Ok(Self { x, y })
    }

    /// Instance whose index addresses global position `k`.
    pub fn addressing(x: Vec<bool>, k: usize) -> Result<Self> {
        let (sqrt_n, log_n) = geometry(x.len())?;
        let h = log_n / 2;
        if k >= x.len() {
            return Err(invalid(format!("index {k} out of range")));
        }
        let mut y = bin((k / sqrt_n) as u64, h)?;
        y.extend(bin((k % sqrt_n) as u64, h)?);
        Self::new(x, y)
    }

    pub fn target(&self) -> usize {
        let (sqrt_n, log_n) = geometry(self.x.len()).expect("validated");
        let h = log_n / 2;
        sqrt_n * dec(&self.y[..h]) as usize + dec(&self.y[h..]) as usize
    }

    pub fn truth(&self) -> bool {
        self.x[self.target()]
    }
}

/// A built standalone neuro-RAM, ready for repeated simulation.
#[derive(Clone, Debug)]
pub struct NeuroRam {
    pub net: Network,
    pub layout: NeuroRamLayout,
}

impl NeuroRam {
    pub fn new(n: usize, with_reset: bool, lambda: Temperature) -> Result<Self> {
        let (net, layout) = build_neuro_ram(n, with_reset, lambda)?;
        Ok(Self { net, layout })
    }

    pub fn clamps(&self, inst: &IndexInstance) -> Result<ClampSpec> {
        if inst.x.len() != self.layout.n {
            return Err(invalid("instance size does not match network"));
        }
        let mut bits = Vec::with_capacity(self.layout.n + self.layout.log_n);
        bits.extend(self.layout.x.iter().copied().zip(inst.x.iter().copied()));
        bits.extend(self.layout.y.iter().copied().zip(inst.y.iter().copied()));
        ClampSpec::new(&self.net, bits)
    }

    pub fn trace(&self, inst: &IndexInstance, rounds: usize, seed: u64) -> Result<Trace> {
        Ok(Simulator::new(&self.net).run(&self.clamps(inst)?, rounds, seed))
    }

    /// Output bit at round `5 sqrt n`.
    pub fn solve(&self, sim: &Simulator<'_>, inst: &IndexInstance, seed: u64) -> Result<bool> {
        let clamps = self.clamps(inst)?;
        let state = sim.run_final(&clamps, self.layout.readout_round(), seed);
        Ok(state.get(self.layout.z))
    }

    /// Successes over `trials` seeds derived from `seed`.
    pub fn success_count(&self, inst: &IndexInstance, trials: u64, seed: u64) -> Result<u64> {
        let sim = Simulator::new(&self.net);
        let clamps = self.clamps(inst)?;
        let truth = inst.truth();
        let rounds = self.layout.readout_round();
        Ok((0..trials)
            .into_par_iter()
            .filter(|&t| {
                sim.run_final(&clamps, rounds, derive_seed(seed, 0, t))
                    .get(self.layout.z)
                    == truth
            })
            .count() as u64)
    }

    /// Presents each instance for one window of `5 sqrt n + 1` rounds and
    /// samples the output at the end of every window. Needs the reset neuron.
    pub fn run_multi_input(&self, instances: &[IndexInstance], seed: u64) -> Result<Vec<bool>> {
        if self.layout.reset.is_none() {
            return Err(Error::Contract(
                "multi-input runs need a network built with reset".into(),
            ));
        }
        if instances.is_empty() {
            return Ok(Vec::new());
        }
        let clamps = instances
            .iter()
            .map(|i| self.clamps(i))
            .collect::<Result<Vec<_>>>()?;
        let w = self.layout.window();
        let total = instances.len() * w - 1;
        let trace = Simulator::new(&self.net).run_schedule(total, seed, |t| &clamps[t as usize / w]);
        Ok((0..instances.len())
            .map(|k| trace.fired(k * w + self.layout.rounds(), self.layout.z))
            .collect())
    }
}

/// Builds the network for `n` and returns the output bit for one run.
pub fn solve_index(n: usize, inst: &IndexInstance, seed: u64, lambda: Temperature) -> Result<bool> {
    let ram = NeuroRam::new(n, false, lambda)?;
    let sim = Simulator::new(&ram.net);
    ram.solve(&sim, inst, seed)
}

/// Chain-clock behavior in one trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClockOutcome {
    /// No data bit fired, so the initiator never fired.
    NeverStarted,
    Ran(ClockReport),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockReport {
    /// Rounds in which `c_0` fired.
    pub initiator_spikes: Vec<usize>,
    /// `(i, spikes)` for every chain neuron `c_i`, `i >= 1`, off its single slot.
    pub chain_mismatches: Vec<(usize, Vec<usize>)>,
    expected_initiator: Vec<usize>,
}

impl ClockReport {
    /// Every `c_i` with `i >= 1` fired exactly once, at its slot.
    pub fn chain_exact(&self) -> bool {
        self.chain_mismatches.is_empty()
    }

    /// `c_0` fired at its start round and the following one (the first inhibitor
    /// arrives one round after the start), then stayed silent.
    pub fn initiator_ok(&self) -> bool {
        self.initiator_spikes == self.expected_initiator
    }

    pub fn passes(&self) -> bool {
        self.chain_exact() && self.initiator_ok()
    }
}

impl ClockOutcome {
    pub fn passes(&self) -> bool {
        matches!(self, ClockOutcome::Ran(r) if r.passes())
    }
}

/// Simulates one window and checks the clock pulse pattern.
pub fn clock_trace_check(
    net: &Network,
    layout: &NeuroRamLayout,
    clamps: &ClampSpec,
    seed: u64,
) -> ClockOutcome {
    let horizon = layout.rounds() + 1 + layout.offset;
    let trace = Simulator::new(net).run(clamps, horizon, seed);
    clock_outcome(&trace, layout, horizon)
}

pub(crate) fn clock_outcome(trace: &Trace, layout: &NeuroRamLayout, horizon: usize) -> ClockOutcome {
    let within = |id: NeuronId| -> Vec<usize> {
        trace.spikes(id).into_iter().filter(|&t| t <= horizon).collect()
    };
    let initiator_spikes = within(layout.clock[0]);
    if initiator_spikes.is_empty() {
        return ClockOutcome::NeverStarted;
    }
    let chain_mismatches = (1..layout.clock.len())
        .filter_map(|i| {
            let s = within(layout.clock[i]);
            (s != [layout.clock_round(i)]).then_some((i, s))
        })
        .collect();
    let start = 1 + layout.offset;
    ClockOutcome::Ran(ClockReport {
        initiator_spikes,
        chain_mismatches,
        expected_initiator: vec![start, start + 1],
    })
}

/// True when some encoder other than `selected` fired between the selection
/// round and the readout round.
pub fn wrong_encoder_fired(trace: &Trace, layout: &NeuroRamLayout, selected: usize) -> bool {
    (layout.selection_round()..=layout.readout_round().min(trace.len() - 1)).any(|t| {
        layout
            .e
            .iter()
            .enumerate()
            .any(|(k, &ek)| k != selected && trace.fired(t, ek))
    })
}

/// Encoder potential expected at round `5j + 2` while decoding bucket `bucket`:
/// `1 - 2^(sqrt n - j) + sum_{j' >= j} bucket_j' 2^(sqrt n - j')`.
pub fn expected_reading_potential(bucket: &[bool], j: usize) -> BigInt {
    let s = bucket.len();
    let tail: BigInt = (j..s).filter(|&k| bucket[k]).map(|k| pow2(s - k)).sum();
    BigInt::one() - pow2(s - j) + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::potential;
    use crate::model::validate;

    fn lam32() -> Temperature {
        Temperature::new(1, 32).unwrap()
    }

    #[test]
    fn geometry_rejects_bad_sizes() {
        assert_eq!(geometry(4).unwrap(), (2, 2));
        assert_eq!(geometry(16).unwrap(), (4, 4));
        assert_eq!(geometry(1024).unwrap(), (32, 10));
        for bad in [0, 1, 2, 8, 12, 32] {
            assert!(geometry(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn n4_weights_and_biases() {
        let (net, l) = build_neuro_ram(4, false, lam32()).unwrap();
        assert_eq!(net.weight(l.x[0], l.e[0]), BigInt::from(4));
        assert_eq!(net.weight(l.x[1], l.e[0]), BigInt::from(2));
        assert_eq!(net.neuron(l.e[0]).bias, BigInt::from(19));
        assert_eq!(net.weight(l.g[1], l.e[1]), BigInt::from(16));
        assert_eq!(net.neuron(l.d1[0]).bias, BigInt::from(7));
        assert_eq!(net.weight(l.clock[2], l.d1[0]), BigInt::from(4));
        assert_eq!(net.weight(l.clock[7], l.d1[1]), BigInt::from(4));
        assert_eq!(net.weight(l.d2[0], l.e[1]), BigInt::from(2));
        assert_eq!(net.weight(l.d3[1], l.e[0]), BigInt::from(-2));
        assert_eq!(net.weight(l.clock_inhibitors[0], l.clock[0]), BigInt::from(-8));
        assert_eq!(net.weight(l.clock_inhibitors[0], l.clock[1]), BigInt::from(-2));
        assert_eq!(l.clock.len(), 11);
        assert_eq!(l.clock_inhibitors.len(), 9);
    }

    #[test]
    fn n16_validates_and_manifest_is_complete() {
        for reset in [false, true] {
            let (net, l) = build_neuro_ram(16, reset, lam32()).unwrap();
            assert!(validate(&net).is_empty(), "{:?}", validate(&net));
            let manifest = net.manifest().unwrap();
            let mut covered: Vec<_> = manifest.values().flatten().copied().collect();
            covered.sort();
            covered.dedup();
            assert_eq!(covered.len(), net.len());
            assert_eq!(
                net.auxiliary_count(),
                NeuroRamLayout::auxiliary_formula(l.sqrt_n, l.log_n, reset)
            );
        }
    }

    #[test]
    fn d3_has_no_self_loop_and_persists_through_companion() {
        let (net, l) = build_neuro_ram(16, false, lam32()).unwrap();
        for j in 0..l.sqrt_n {
            assert_eq!(net.weight(l.d3[j], l.d3[j]), BigInt::from(0));
            assert_eq!(net.weight(l.d3_companion[j], l.d3[j]), BigInt::from(4));
            assert_eq!(net.weight(l.d3_companion[j], l.d3_companion[j]), BigInt::from(4));
        }
    }

    #[test]
    fn weight_fact() {
        for n in [4, 16, 64] {
            let (net, l) = build_neuro_ram(n, false, lam32()).unwrap();
            assert!(check_weight_fact(&net, &l), "n = {n}");
        }
        let (mut net, l) = build_neuro_ram(16, false, lam32()).unwrap();
        net.set_weight(l.x[0], l.e[0], BigInt::from(64));
        assert!(!check_weight_fact(&net, &l));
    }

    #[test]
    fn encoding_potential_examples() {
        let b = |s: &str| crate::bits::parse_bits(s).unwrap();
        assert_eq!(expected_encoding_potential(&b("1000")).unwrap(), BigInt::from(16));
        assert_eq!(expected_encoding_potential(&b("0000")).unwrap(), BigInt::from(0));
        assert_eq!(expected_encoding_potential(&b("11")).unwrap(), BigInt::from(6));
    }

    #[test]
    fn invalid_sizes_are_rejected() {
        assert!(build_neuro_ram(8, false, lam32()).is_err());
        assert!(IndexInstance::new(vec![false; 16], vec![false; 3]).is_err());
    }

    #[test]
    fn index_convention() {
        let (_, l) = build_neuro_ram(16, false, lam32()).unwrap();
        for k in 0..16 {
            let y = l.index_bits(k).unwrap();
            assert_eq!(l.index_of(&y), k);
            let inst = IndexInstance::new(vec![false; 16], y).unwrap();
            assert_eq!(inst.target(), k);
        }
    }

    #[test]
    fn n4_single_bit() {
        let inst = IndexInstance::new(vec![true, false, false, false], vec![false, false]).unwrap();
        let ram = NeuroRam::new(4, false, lam32()).unwrap();
        assert_eq!(ram.success_count(&inst, 100, 11).unwrap(), 100);
    }

    #[test]
    fn all_zero_data_outputs_zero() {
        let ram = NeuroRam::new(16, false, lam32()).unwrap();
        for k in [0, 5, 15] {
            let inst = IndexInstance::addressing(vec![false; 16], k).unwrap();
            assert_eq!(ram.success_count(&inst, 20, 3).unwrap(), 20);
        }
    }

    #[test]
    fn n16_bit_five() {
        let mut x = vec![false; 16];
        x[5] = true;
        let inst = IndexInstance::addressing(x, 5).unwrap();
        assert!(inst.truth());
        let ram = NeuroRam::new(16, false, lam32()).unwrap();
        assert!(ram.success_count(&inst, 100, 1).unwrap() >= 99);
    }

    #[test]
    fn reading_potential_recurrence_matches_trace() {
        let ram = NeuroRam::new(16, false, lam32()).unwrap();
        let l = &ram.layout;
        let x: Vec<bool> = (0..16).map(|i| (i * 7 + 3) % 5 < 2).collect();
        for k in [1usize, 6, 11] {
            let inst = IndexInstance::addressing(x.clone(), k).unwrap();
            let bucket = k / 4;
            let tr = ram.trace(&inst, l.rounds(), 77).unwrap();
            for j in 0..l.sqrt_n {
                let t = 5 * j + 2;
                let got = potential(&ram.net, tr.state(t), l.e[bucket]).unwrap();
                let want = expected_reading_potential(&x[bucket * 4..bucket * 4 + 4], j);
                assert_eq!(got, want, "bucket {bucket} step {j}");
                assert_eq!(tr.fired(l.read_round(j), l.e[bucket]), x[bucket * 4 + j]);
            }
        }
    }

    #[test]
    fn clock_pattern() {
        let ram = NeuroRam::new(4, false, lam32()).unwrap();
        let inst = IndexInstance::new(vec![false, true, false, false], vec![true, false]).unwrap();
        let clamps = ram.clamps(&inst).unwrap();
        match clock_trace_check(&ram.net, &ram.layout, &clamps, 4) {
            ClockOutcome::Ran(r) => {
                assert!(r.passes(), "{r:?}");
                assert_eq!(r.initiator_spikes, vec![1, 2]);
            }
            other => panic!("{other:?}"),
        }
        let silent = IndexInstance::new(vec![false; 4], vec![true, false]).unwrap();
        let clamps = ram.clamps(&silent).unwrap();
        assert_eq!(
            clock_trace_check(&ram.net, &ram.layout, &clamps, 4),
            ClockOutcome::NeverStarted
        );
    }

    #[test]
    fn multi_input_needs_reset() {
        let ram = NeuroRam::new(4, false, lam32()).unwrap();
        let inst = IndexInstance::addressing(vec![true; 4], 0).unwrap();
        assert!(ram.run_multi_input(&[inst], 0).is_err());
    }

    #[test]
    fn multi_input_two_windows() {
        let ram = NeuroRam::new(4, true, lam32()).unwrap();
        let a = IndexInstance::addressing(vec![false, false, true, false], 2).unwrap();
        let b = IndexInstance::addressing(vec![false, false, true, false], 3).unwrap();
        let mut ok = 0;
        for seed in 0..100 {
            if ram.run_multi_input(&[a.clone(), b.clone()], seed).unwrap() == [true, false] {
                ok += 1;
            }
        }
        assert!(ok >= 98, "{ok}");
        let same = ram.run_multi_input(&[a.clone(), a.clone()], 9).unwrap();
        assert_eq!(same, vec![true, true]);
    }
}
