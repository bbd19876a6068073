//! Recurrent to feedforward unrolling and threshold-circuit sampling.

pub mod equivalence;
pub mod threshold;
pub mod unroll;

pub use equivalence::{distribution_equivalence, joint_law_tv, unrolling_equivalence, EquivalenceReport};
pub use threshold::{eval_threshold_circuit, sample_threshold_circuit, Threshold, ThresholdCircuit};
pub use unroll::{random_network, unroll, FeedforwardNetwork};
