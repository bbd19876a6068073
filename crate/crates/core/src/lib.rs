//! Construction and simulation toolkit for stochastic spiking networks.
//!
//! - [`model`] and [`dynamics`]: networks with exact integer weights and
//!   synchronous sigmoid-firing dynamics.
//! - [`neuroram`]: the indexing network and its structural checks.
//! - [`similarity`]: approximate-equality testing built from neuro-RAM pairs.
//! - [`transforms`]: unrolling to feedforward form and sampling equivalent
//!   deterministic threshold circuits.
//! - [`vc`]: dichotomy counting and VC bound calculators.
//! - [`io`] and [`experiment`]: JSON formats and experiment drivers.

pub mod bits;
pub mod dynamics;
pub mod experiment;
pub mod error;
pub mod io;
pub mod model;
pub mod neuroram;
pub mod rng;
pub mod similarity;
pub mod transforms;
pub mod vc;

pub use error::{Error, Result};
pub use model::{Network, NetworkBuilder, NeuronId, NeuronKind, Polarity, Temperature};
