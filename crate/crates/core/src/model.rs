//! Network data model: neurons, synapses, temperature and structural validation.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NeuronId(pub usize);

impl NeuronId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Excitatory,
    Inhibitory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeuronKind {
    Input,
    Output,
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neuron {
    pub id: NeuronId,
    pub name: String,
    pub kind: NeuronKind,
    pub polarity: Polarity,
    pub bias: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synapse {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub weight: BigInt,
}

/// Sigmoid temperature, a strictly positive rational `p/q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Temperature(Ratio<u64>);

impl Temperature {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(invalid("temperature denominator is zero"));
        }
        if numer == 0 {
            return Err(invalid("temperature must be positive"));
        }
        Ok(Self(Ratio::new(numer, denom)))
    }

    /// `1 / (4 log2 n)`, the default used by the network builders.
    pub fn default_for(n: usize) -> Result<Self> {
        let log = crate::bits::exact_log2(n)
            .filter(|&l| l > 0)
            .ok_or_else(|| invalid(format!("n = {n} is not a power of two above 1")))?;
        Self::new(1, 4 * u64::from(log))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn as_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Temperature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| invalid(format!("bad temperature {s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((p, q)) => Self::new(parse(p)?, parse(q)?),
            None => Self::new(parse(s)?, 1),
        }
    }
}

/// Role name to neuron ids, emitted by the builders.
pub type Manifest = BTreeMap<String, Vec<NeuronId>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    neurons: Vec<Neuron>,
    // Incoming synapses grouped by postsynaptic neuron, sorted by presynaptic id.
    incoming: Vec<Vec<(NeuronId, BigInt)>>,
    lambda: Temperature,
    manifest: Option<Manifest>,
}

impl Network {
    /// Assembles a network. Neuron ids must be dense and in order, and every
    /// synapse endpoint must exist; semantic rules are left to [`validate`].
    pub fn from_parts(
        neurons: Vec<Neuron>,
        synapses: Vec<Synapse>,
        lambda: Temperature,
        manifest: Option<Manifest>,
    ) -> Result<Self> {
        for (i, n) in neurons.iter().enumerate() {
            if n.id.0 != i {
                return Err(invalid(format!("neuron at position {i} has id {}", n.id.0)));
            }
        }
        let count = neurons.len();
        let mut incoming = vec![Vec::new(); count];
        for s in synapses {
            if s.pre.0 >= count || s.post.0 >= count {
                return Err(invalid(format!(
                    "synapse {} -> {} references a missing neuron",
                    s.pre, s.post
                )));
            }
            incoming[s.post.0].push((s.pre, s.weight));
        }
        for list in &mut incoming {
            list.sort_by_key(|(pre, _)| *pre);
        }
        if let Some(m) = &manifest {
            if let Some(bad) = m.values().flatten().find(|id| id.0 >= count) {
                return Err(invalid(format!("manifest references missing neuron {bad}")));
            }
        }
        Ok(Self {
            neurons,
            incoming,
            lambda,
            manifest,
        })
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }

    pub fn neurons(&self) -> &[Neuron] {
        &self.neurons
    }

    pub fn neuron(&self, id: NeuronId) -> &Neuron {
        &self.neurons[id.0]
    }

    pub fn lambda(&self) -> Temperature {
        self.lambda
    }

    pub fn with_lambda(mut self, lambda: Temperature) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn manifest(&self) -> Option<&Manifest> {
        self.manifest.as_ref()
    }

    pub fn incoming(&self, post: NeuronId) -> &[(NeuronId, BigInt)] {
        &self.incoming[post.0]
    }

    pub fn synapses(&self) -> impl Iterator<Item = Synapse> + '_ {
        self.incoming.iter().enumerate().flat_map(|(post, list)| {
            list.iter().map(move |(pre, w)| Synapse {
                pre: *pre,
                post: NeuronId(post),
                weight: w.clone(),
            })
        })
    }

    pub fn synapse_count(&self) -> usize {
        self.incoming.iter().map(Vec::len).sum()
    }

    /// Weight of `pre -> post`, zero when absent.
    pub fn weight(&self, pre: NeuronId, post: NeuronId) -> BigInt {
        self.incoming[post.0]
            .iter()
            .filter(|(p, _)| *p == pre)
            .map(|(_, w)| w.clone())
            .sum()
    }

    pub fn ids_of(&self, kind: NeuronKind) -> Vec<NeuronId> {
        self.neurons
            .iter()
            .filter(|n| n.kind == kind)
            .map(|n| n.id)
            .collect()
    }

    pub fn inputs(&self) -> Vec<NeuronId> {
        self.ids_of(NeuronKind::Input)
    }

    pub fn outputs(&self) -> Vec<NeuronId> {
        self.ids_of(NeuronKind::Output)
    }

    pub fn auxiliary_count(&self) -> usize {
        self.ids_of(NeuronKind::Auxiliary).len()
    }

    pub fn find(&self, name: &str) -> Option<NeuronId> {
        self.neurons.iter().find(|n| n.name == name).map(|n| n.id)
    }

    /// Replaces the weight of an existing or new synapse; zero removes it.
    pub fn set_weight(&mut self, pre: NeuronId, post: NeuronId, weight: BigInt) {
        let list = &mut self.incoming[post.0];
        list.retain(|(p, _)| *p != pre);
        if !weight.is_zero() {
            list.push((pre, weight));
            list.sort_by_key(|(p, _)| *p);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    InputInDegree,
    PolaritySign,
    BoundaryPolarity,
    NegativeBias,
    DuplicateSynapse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub neuron: NeuronId,
    pub synapse: Option<(NeuronId, NeuronId)>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}: {}", self.rule, self.neuron, self.detail)
    }
}

/// Lists every broken structural rule. An empty list means the network is well formed.
pub fn validate(net: &Network) -> Vec<Violation> {
    let mut out = Vec::new();
    for n in net.neurons() {
        if n.bias.is_negative() {
            out.push(Violation {
                rule: Rule::NegativeBias,
                neuron: n.id,
                synapse: None,
                detail: format!("{} has bias {}", n.name, n.bias),
            });
        }
        if n.kind != NeuronKind::Auxiliary && n.polarity != Polarity::Excitatory {
            out.push(Violation {
                rule: Rule::BoundaryPolarity,
                neuron: n.id,
                synapse: None,
                detail: format!("{} is {:?} but must be excitatory", n.name, n.kind),
            });
        }
        let incoming = net.incoming(n.id);
        if n.kind == NeuronKind::Input {
            for (pre, _) in incoming {
                out.push(Violation {
                    rule: Rule::InputInDegree,
                    neuron: n.id,
                    synapse: Some((*pre, n.id)),
                    detail: format!("input {} has incoming synapse from {}", n.name, pre),
                });
            }
        }
        let mut seen = HashSet::new();
        for (pre, w) in incoming {
            if !seen.insert(*pre) {
                out.push(Violation {
                    rule: Rule::DuplicateSynapse,
                    neuron: n.id,
                    synapse: Some((*pre, n.id)),
                    detail: format!("more than one synapse {} -> {}", pre, n.id),
                });
            }
            let src = net.neuron(*pre);
            let bad = match src.polarity {
                Polarity::Excitatory => w.is_negative(),
                Polarity::Inhibitory => w.is_positive(),
            };
            if bad {
                out.push(Violation {
                    rule: Rule::PolaritySign,
                    neuron: *pre,
                    synapse: Some((*pre, n.id)),
                    detail: format!(
                        "{:?} neuron {} has outgoing weight {} to {}",
                        src.polarity, src.name, w, n.name
                    ),
                });
            }
        }
    }
    out
}

/// Incremental construction used by all network builders.
#[derive(Clone, Debug, Default)]
pub struct NetworkBuilder {
    neurons: Vec<Neuron>,
    synapses: BTreeMap<(NeuronId, NeuronId), BigInt>,
    manifest: Manifest,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }

    pub fn add(
        &mut self,
        name: impl Into<String>,
        kind: NeuronKind,
        polarity: Polarity,
        bias: impl Into<BigInt>,
    ) -> NeuronId {
        let id = NeuronId(self.neurons.len());
        self.neurons.push(Neuron {
            id,
            name: name.into(),
            kind,
            polarity,
            bias: bias.into(),
        });
        id
    }

    pub fn input(&mut self, name: impl Into<String>) -> NeuronId {
        self.add(name, NeuronKind::Input, Polarity::Excitatory, 0)
    }

    pub fn excitatory(&mut self, name: impl Into<String>, bias: impl Into<BigInt>) -> NeuronId {
        self.add(name, NeuronKind::Auxiliary, Polarity::Excitatory, bias)
    }

    pub fn inhibitory(&mut self, name: impl Into<String>, bias: impl Into<BigInt>) -> NeuronId {
        self.add(name, NeuronKind::Auxiliary, Polarity::Inhibitory, bias)
    }

    pub fn neuron(&self, id: NeuronId) -> &Neuron {
        &self.neurons[id.0]
    }

    pub fn set_kind(&mut self, id: NeuronId, kind: NeuronKind) {
        self.neurons[id.0].kind = kind;
    }

    /// Sets `pre -> post`; a zero weight removes the synapse.
    pub fn connect(&mut self, pre: NeuronId, post: NeuronId, weight: impl Into<BigInt>) {
        let weight = weight.into();
        if weight.is_zero() {
            self.synapses.remove(&(pre, post));
        } else {
            self.synapses.insert((pre, post), weight);
        }
    }

    pub fn weight(&self, pre: NeuronId, post: NeuronId) -> BigInt {
        self.synapses.get(&(pre, post)).cloned().unwrap_or_default()
    }

    /// Sum of positive incoming weights of `post`.
    pub fn excitatory_in_weight(&self, post: NeuronId) -> BigInt {
        self.synapses
            .iter()
            .filter(|((_, p), w)| *p == post && w.is_positive())
            .map(|(_, w)| w.clone())
            .sum()
    }

    pub fn role(&mut self, role: impl Into<String>, id: NeuronId) {
        self.manifest.entry(role.into()).or_default().push(id);
    }

    pub fn build(self, lambda: Temperature) -> Network {
        let synapses = self
            .synapses
            .into_iter()
            .map(|((pre, post), weight)| Synapse { pre, post, weight })
            .collect();
        let manifest = (!self.manifest.is_empty()).then_some(self.manifest);
        Network::from_parts(self.neurons, synapses, lambda, manifest)
            .expect("builder produces consistent ids")
    }
}
