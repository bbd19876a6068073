//! JSON formats for networks, feedforward networks and threshold circuits.
//!
//! Big integers are written as decimal strings so that weights beyond 64 bits
//! survive any JSON reader. Temperatures are written as `"p/q"`.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Manifest, Network, Neuron, NeuronId, NeuronKind, Polarity, Synapse, Temperature};
use crate::transforms::{FeedforwardNetwork, Threshold, ThresholdCircuit};

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.trim()
            .parse()
            .map_err(|_| D::Error::custom(format!("`{s}` is not a decimal integer")))
    }
}

mod temperature_string {
    use crate::model::Temperature;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Temperature, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Temperature, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NeuronJson {
    id: NeuronId,
    name: String,
    kind: NeuronKind,
    polarity: Polarity,
    #[serde(with = "bigint_string")]
    bias: BigInt,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynapseJson {
    pre: NeuronId,
    post: NeuronId,
    #[serde(with = "bigint_string")]
    weight: BigInt,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkJson {
    #[serde(with = "temperature_string")]
    lambda: Temperature,
    neurons: Vec<NeuronJson>,
    synapses: Vec<SynapseJson>,
    #[serde(default)]
    manifest: Option<Manifest>,
}

impl From<&Network> for NetworkJson {
    fn from(net: &Network) -> Self {
        Self {
            lambda: net.lambda(),
            neurons: net
                .neurons()
                .iter()
                .map(|n| NeuronJson {
                    id: n.id,
                    name: n.name.clone(),
                    kind: n.kind,
                    polarity: n.polarity,
                    bias: n.bias.clone(),
                })
                .collect(),
            synapses: net
                .synapses()
                .map(|s| SynapseJson {
                    pre: s.pre,
                    post: s.post,
                    weight: s.weight,
                })
                .collect(),
            manifest: net.manifest().cloned(),
        }
    }
}

impl NetworkJson {
    fn into_network(self) -> Result<Network> {
        let neurons = self
            .neurons
            .into_iter()
            .map(|n| Neuron {
                id: n.id,
                name: n.name,
                kind: n.kind,
                polarity: n.polarity,
                bias: n.bias,
            })
            .collect();
        let synapses = self
            .synapses
            .into_iter()
            .map(|s| Synapse {
                pre: s.pre,
                post: s.post,
                weight: s.weight,
            })
            .collect();
        Network::from_parts(neurons, synapses, self.lambda, self.manifest)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeedforwardJson {
    network: NetworkJson,
    inputs: Vec<NeuronId>,
    layers: Vec<Vec<NeuronId>>,
    output: NeuronId,
}

impl From<&FeedforwardNetwork> for FeedforwardJson {
    fn from(ff: &FeedforwardNetwork) -> Self {
        Self {
            network: (&ff.net).into(),
            inputs: ff.inputs.clone(),
            layers: ff.layers.clone(),
            output: ff.output,
        }
    }
}

impl FeedforwardJson {
    fn into_feedforward(self) -> Result<FeedforwardNetwork> {
        FeedforwardNetwork::new(self.network.into_network()?, self.inputs, self.layers, self.output)
    }
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    gate: NeuronId,
    #[serde(flatten)]
    threshold: Threshold,
    /// Informational; ignored on load.
    #[serde(default, skip_deserializing)]
    eta: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitJson {
    feedforward: FeedforwardJson,
    thresholds: Vec<GateJson>,
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("in-memory serialization cannot fail")
}

pub fn network_to_json(net: &Network) -> String {
    pretty(&NetworkJson::from(net))
}

pub fn network_from_json(text: &str) -> Result<Network> {
    parse::<NetworkJson>(text)?.into_network()
}

pub fn save_network(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, network_to_json(net))?)
}

pub fn load_network(path: impl AsRef<Path>) -> Result<Network> {
    network_from_json(&fs::read_to_string(path)?)
}

pub fn feedforward_to_json(ff: &FeedforwardNetwork) -> String {
    pretty(&FeedforwardJson::from(ff))
}

pub fn feedforward_from_json(text: &str) -> Result<FeedforwardNetwork> {
    parse::<FeedforwardJson>(text)?.into_feedforward()
}

pub fn circuit_to_json(tc: &ThresholdCircuit) -> String {
    let thresholds = tc
        .ff
        .gates()
        .map(|g| {
            let t = tc.threshold(g).expect("gate has threshold").clone();
            GateJson {
                gate: g,
                eta: t.eta(),
                threshold: t,
            }
        })
        .collect();
    pretty(&CircuitJson {
        feedforward: (&tc.ff).into(),
        thresholds,
    })
}

pub fn circuit_from_json(text: &str) -> Result<ThresholdCircuit> {
    let c: CircuitJson = parse(text)?;
    let ff = c.feedforward.into_feedforward()?;
    let mut thresholds = vec![None; ff.net.len()];
    for g in c.thresholds {
        if g.gate.0 >= thresholds.len() {
            return Err(Error::Contract(format!("threshold for unknown gate {}", g.gate)));
        }
        thresholds[g.gate.0] = Some(g.threshold);
    }
    if let Some(g) = ff.gates().find(|g| thresholds[g.0].is_none()) {
        return Err(Error::Contract(format!("gate {g} has no threshold")));
    }
    Ok(ThresholdCircuit { ff, thresholds })
}
