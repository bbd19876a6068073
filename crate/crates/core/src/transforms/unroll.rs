//! Layered feedforward copies of recurrent networks.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::firing_probability;
use crate::error::{invalid, Error, Result};
use crate::model::{Network, NetworkBuilder, NeuronId, NeuronKind, Polarity, Temperature};
use crate::rng::{unit_closed_open, Streams};

/// An acyclic network with an explicit layer assignment.
///
/// Layer `i` (1-based) only reads inputs and layer `i - 1`; the output reads
/// inputs and the last layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeedforwardNetwork {
    pub net: Network,
    pub inputs: Vec<NeuronId>,
    pub layers: Vec<Vec<NeuronId>>,
    pub output: NeuronId,
}

impl FeedforwardNetwork {
    /// Wraps `net` after checking the layering constraints.
    pub fn new(
        net: Network,
        inputs: Vec<NeuronId>,
        layers: Vec<Vec<NeuronId>>,
        output: NeuronId,
    ) -> Result<Self> {
        let ff = Self {
            net,
            inputs,
            layers,
            output,
        };
        ff.check_layering()?;
        Ok(ff)
    }

    /// Layer of every neuron: 0 for inputs, `L + 1` for the output.
    fn depths(&self) -> Result<Vec<usize>> {
        let mut depth = vec![usize::MAX; self.net.len()];
        for &i in &self.inputs {
            depth[i.0] = 0;
        }
        for (k, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                if depth[v.0] != usize::MAX {
                    return Err(Error::Contract(format!("{v} assigned twice")));
                }
                depth[v.0] = k + 1;
            }
        }
        if depth[self.output.0] != usize::MAX {
            return Err(Error::Contract("output also listed in a layer".into()));
        }
        depth[self.output.0] = self.layers.len() + 1;
        if let Some(u) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(Error::Contract(format!("#{u} has no layer")));
        }
        Ok(depth)
    }

    /// Every edge goes from an input, or from layer `i - 1` into layer `i`.
    pub fn check_layering(&self) -> Result<()> {
        let depth = self.depths()?;
        for &i in &self.inputs {
            if self.net.neuron(i).kind != NeuronKind::Input {
                return Err(Error::Contract(format!("{i} is not an input neuron")));
            }
        }
        for s in self.net.synapses() {
            let (a, b) = (depth[s.pre.0], depth[s.post.0]);
            if b == 0 {
                return Err(Error::Contract(format!("edge into input {}", s.post)));
            }
            if a != 0 && a + 1 != b {
                return Err(Error::Contract(format!(
                    "edge {} -> {} skips from layer {a} to {b}",
                    s.pre, s.post
                )));
            }
        }
        Ok(())
    }

    /// Gates in evaluation order: each layer, then the output.
    pub fn gates(&self) -> impl Iterator<Item = NeuronId> + '_ {
        self.layers
            .iter()
            .flatten()
            .copied()
            .chain(std::iter::once(self.output))
    }

    /// Kahn's algorithm over the whole graph; true when no cycle exists.
    pub fn is_acyclic(&self) -> bool {
        let n = self.net.len();
        let mut indeg = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in self.net.synapses() {
            indeg[s.post.0] += 1;
            out[s.pre.0].push(s.post.0);
        }
        let mut stack: Vec<usize> = (0..n).filter(|&u| indeg[u] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &v in &out[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        seen == n
    }

    pub fn auxiliary_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn lambda(&self) -> Temperature {
        self.net.lambda()
    }

    fn input_state(&self, bits: &[bool]) -> Result<Vec<bool>> {
        if bits.len() != self.inputs.len() {
            return Err(invalid(format!(
                "expected {} input bits, got {}",
                self.inputs.len(),
                bits.len()
            )));
        }
        let mut state = vec![false; self.net.len()];
        for (&i, &b) in self.inputs.iter().zip(bits) {
            state[i.0] = b;
        }
        Ok(state)
    }

    /// One stochastic forward pass: every gate fires with its sigmoid
    /// probability given the already evaluated earlier layers.
    pub fn sample_state(&self, bits: &[bool], rng: &mut ChaCha8Rng) -> Result<Vec<bool>> {
        let mut state = self.input_state(bits)?;
        let lambda = self.lambda();
        for g in self.gates() {
            let pot = self.net.incoming(g).iter().fold(
                -self.net.neuron(g).bias.clone(),
                |acc, (pre, w)| if state[pre.0] { acc + w } else { acc },
            );
            state[g.0] = rng.random::<f64>() < firing_probability(&pot, lambda);
        }
        Ok(state)
    }

    pub fn sample(&self, bits: &[bool], seed: u64) -> Result<bool> {
        let mut rng = Streams::new(seed).stream(0);
        Ok(self.sample_state(bits, &mut rng)?[self.output.0])
    }
}

/// Feedforward network that reproduces the round-`t` output distribution of
/// `net` under constant inputs. Layer `i` copies every non-input neuron.
pub fn unroll(net: &Network, t: usize) -> Result<FeedforwardNetwork> {
    if t < 2 {
        return Err(invalid(format!("unrolling needs t >= 2, got {t}")));
    }
    let outputs = net.outputs();
    let [z] = outputs[..] else {
        return Err(invalid(format!(
            "unrolling needs exactly one output neuron, found {}",
            outputs.len()
        )));
    };
    let inputs = net.inputs();
    let body: Vec<NeuronId> = net
        .neurons()
        .iter()
        .filter(|n| n.kind != NeuronKind::Input)
        .map(|n| n.id)
        .collect();

    let mut b = NetworkBuilder::new();
    let mut map_input = vec![None; net.len()];
    for &i in &inputs {
        let id = b.input(net.neuron(i).name.clone());
        map_input[i.0] = Some(id);
        b.role("input", id);
    }
    let copy = |b: &mut NetworkBuilder, u: NeuronId, name: String, kind: NeuronKind| {
        let src = net.neuron(u);
        b.add(name, kind, src.polarity, src.bias.clone())
    };

    // layer_ids[i][u] = copy of u in layer i + 1
    let mut layer_ids: Vec<Vec<Option<NeuronId>>> = Vec::with_capacity(t - 1);
    let mut layers = Vec::with_capacity(t - 1);
    for i in 1..t {
        let mut ids = vec![None; net.len()];
        let mut layer = Vec::with_capacity(body.len());
        for &u in &body {
            let name = format!("{}@{i}", net.neuron(u).name);
            let id = copy(&mut b, u, name, NeuronKind::Auxiliary);
            ids[u.0] = Some(id);
            layer.push(id);
            b.role(format!("layer_{i}"), id);
        }
        layer_ids.push(ids);
        layers.push(layer);
    }
    let out = copy(&mut b, z, net.neuron(z).name.clone(), NeuronKind::Output);
    b.role("output", out);

    for s in net.synapses() {
        let w = s.weight.clone();
        if let Some(src) = map_input[s.pre.0] {
            for ids in &layer_ids {
                b.connect(src, ids[s.post.0].expect("non-input target"), w.clone());
            }
            if s.post == z {
                b.connect(src, out, w);
            }
            continue;
        }
        for i in 1..layer_ids.len() {
            let pre = layer_ids[i - 1][s.pre.0].expect("body");
            let post = layer_ids[i][s.post.0].expect("body");
            b.connect(pre, post, w.clone());
        }
        if s.post == z {
            let pre = layer_ids[t - 2][s.pre.0].expect("body");
            b.connect(pre, out, w);
        }
    }
    let inputs = (0..inputs.len()).map(NeuronId).collect();
    FeedforwardNetwork::new(b.build(net.lambda()), inputs, layers, out)
}

/// Random recurrent network with small integer weights for equivalence tests.
/// Neuron `inputs + aux` is the single output.
pub fn random_network(inputs: usize, aux: usize, seed: u64, lambda: Temperature) -> Network {
    let mut rng = Streams::new(seed).stream(0);
    let mut b = NetworkBuilder::new();
    let xs: Vec<_> = (0..inputs).map(|i| b.input(format!("x_{i}"))).collect();
    let mut body = Vec::with_capacity(aux + 1);
    for a in 0..aux {
        let bias = rng.random_range(0..=2);
        let id = if rng.random_bool(0.3) {
            b.inhibitory(format!("a_{a}"), bias)
        } else {
            b.excitatory(format!("a_{a}"), bias)
        };
        body.push(id);
    }
    let z = b.add("z", NeuronKind::Output, Polarity::Excitatory, rng.random_range(0..=2));
    body.push(z);
    for &pre in xs.iter().chain(&body) {
        let sign = match b.neuron(pre).polarity {
            Polarity::Excitatory => 1,
            Polarity::Inhibitory => -1,
        };
        for &post in &body {
            if unit_closed_open(&mut rng) < 0.6 {
                b.connect(pre, post, sign * rng.random_range(1..=3i64));
            }
        }
    }
    b.build(lambda)
}

/// Exact `W - b` as `f64`, or `None` if it does not fit a double exactly.
pub(crate) fn exact_f64(v: &BigInt) -> Option<f64> {
    let x = v.to_i64()?;
    (x.unsigned_abs() <= 1 << 53).then_some(x as f64)
}
