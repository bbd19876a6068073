//! Dichotomy counting for fixed-weight, variable-threshold circuits, and the
//! VC bound calculators.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const COMBINATION_BUDGET: u128 = 10_000_000;
pub const SUBSET_BUDGET: u128 = 1_000_000;

/// One gate: fixed weights from the `d` inputs and from earlier gates.
/// The threshold is free.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarGate {
    pub input_weights: Vec<f64>,
    /// `(gate index, weight)`; the index must be smaller than this gate's.
    #[serde(default)]
    pub gate_weights: Vec<(usize, f64)>,
}

/// Gates listed in topological order; the last gate is the output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarThresholdArchitecture {
    pub d: usize,
    pub gates: Vec<VarGate>,
}

impl VarThresholdArchitecture {
    pub fn new(d: usize, gates: Vec<VarGate>) -> Result<Self> {
        let a = Self { d, gates };
        a.check()?;
        Ok(a)
    }

    pub fn check(&self) -> Result<()> {
        if self.gates.is_empty() {
            return Err(invalid("architecture needs at least one gate"));
        }
        for (i, g) in self.gates.iter().enumerate() {
            if g.input_weights.len() != self.d {
                return Err(invalid(format!(
                    "gate {i} has {} input weights, expected {}",
                    g.input_weights.len(),
                    self.d
                )));
            }
            if let Some(&(j, _)) = g.gate_weights.iter().find(|(j, _)| *j >= i) {
                return Err(invalid(format!("gate {i} reads gate {j}, which is not earlier")));
            }
            let weights = g.input_weights.iter().chain(g.gate_weights.iter().map(|(_, w)| w));
            if weights.clone().any(|w| !w.is_finite()) {
                return Err(invalid(format!("gate {i} has a non-finite weight")));
            }
        }
        Ok(())
    }

    pub fn single_gate(weights: Vec<f64>) -> Self {
        Self {
            d: weights.len(),
            gates: vec![VarGate {
                input_weights: weights,
                gate_weights: vec![],
            }],
        }
    }

    pub fn m(&self) -> usize {
        self.gates.len()
    }

    /// Pre-activation of gate `i` on input `x`, given earlier gate values.
    pub fn preactivation(&self, i: usize, x: &[bool], upstream: &[bool]) -> f64 {
        let g = &self.gates[i];
        let from_inputs: f64 = g
            .input_weights
            .iter()
            .zip(x)
            .filter(|(_, &b)| b)
            .map(|(w, _)| w)
            .sum();
        let from_gates: f64 = g
            .gate_weights
            .iter()
            .filter(|(j, _)| upstream[*j])
            .map(|(_, w)| w)
            .sum();
        from_inputs + from_gates
    }

    /// Output for input `x` with thresholds `theta` (fires iff sum >= theta).
    pub fn eval(&self, theta: &[f64], x: &[bool]) -> bool {
        let mut vals = Vec::with_capacity(self.m());
        for i in 0..self.m() {
            let v = self.preactivation(i, x, &vals) >= theta[i];
            vals.push(v);
        }
        *vals.last().expect("m >= 1")
    }
}

/// Distinct points of `{0,1}^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub d: usize,
    pub points: Vec<Vec<bool>>,
}

impl SampleSet {
    pub fn new(d: usize, points: Vec<Vec<bool>>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(invalid(format!("sample of length {} in dimension {d}", p.len())));
        }
        let distinct: HashSet<_> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(invalid("samples must be distinct"));
        }
        Ok(Self { d, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// All `2^d` points, in binary order with bit 0 first.
    pub fn cube(d: usize) -> Vec<Vec<bool>> {
        (0..1u64 << d)
            .map(|v| (0..d).map(|i| v >> i & 1 == 1).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomyCount {
    /// Distinct labelings of the samples by the output gate.
    pub count: u128,
    /// Largest number of distinct behaviors of each gate over all upstream
    /// configurations that were reached.
    pub per_gate: Vec<u64>,
}

struct Search<'a> {
    arch: &'a VarThresholdArchitecture,
    samples: &'a [Vec<bool>],
    /// values[i][p]: value of gate i on sample p in the current branch.
    values: Vec<Vec<bool>>,
    labelings: HashSet<Vec<bool>>,
    per_gate: Vec<u64>,
}

impl Search<'_> {
    fn behaviors(&self, i: usize) -> Vec<Vec<bool>> {
        let z = self.samples.len();
        let pre: Vec<f64> = (0..z)
            .map(|p| {
                let upstream: Vec<bool> = (0..i).map(|j| self.values[j][p]).collect();
                self.arch.preactivation(i, &self.samples[p], &upstream)
            })
            .collect();
        let mut cuts = pre.clone();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let above = cuts.last().map_or(0.0, |m| m + 1.0);
        cuts.push(above);
        cuts.iter()
            .map(|&theta| pre.iter().map(|&s| s >= theta).collect())
            .collect()
    }

    fn descend(&mut self, i: usize) {
        let options = self.behaviors(i);
        self.per_gate[i] = self.per_gate[i].max(options.len() as u64);
        for b in options {
            if i + 1 == self.arch.m() {
                self.labelings.insert(b);
            } else {
                self.values[i] = b;
                self.descend(i + 1);
            }
        }
    }
}

/// Exact number of labelings of `samples` produced by some threshold choice.
pub fn count_dichotomies(
    arch: &VarThresholdArchitecture,
    samples: &SampleSet,
) -> Result<DichotomyCount> {
    arch.check()?;
    if samples.d != arch.d {
        return Err(invalid("sample dimension does not match architecture"));
    }
    let z = samples.len() as u128;
    let needed = (z + 1)
        .checked_pow(arch.m() as u32)
        .and_then(|p| p.checked_mul(z.max(1)))
        .unwrap_or(u128::MAX);
    if needed > COMBINATION_BUDGET {
        return Err(Error::Budget {
            needed,
            limit: COMBINATION_BUDGET,
        });
    }
    let mut s = Search {
        arch,
        samples: &samples.points,
        values: vec![Vec::new(); arch.m()],
        labelings: HashSet::new(),
        per_gate: vec![0; arch.m()],
    };
    s.descend(0);
    Ok(DichotomyCount {
        count: s.labelings.len() as u128,
        per_gate: s.per_gate,
    })
}

/// Per-gate counts for the product bound.
pub fn per_gate_counts(arch: &VarThresholdArchitecture, samples: &SampleSet) -> Result<Vec<u64>> {
    Ok(count_dichotomies(arch, samples)?.per_gate)
}

pub fn baum_product_bound(per_gate_counts: &[u64]) -> BigUint {
    per_gate_counts.iter().map(|&c| BigUint::from(c)).product()
}

/// `3 m log2 m`.
pub fn circuit_vc_upper(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(invalid(format!("the circuit bound needs m >= 2 gates, got {m}")));
    }
    let m = m as f64;
    Ok(3.0 * m * m.log2())
}

/// `log2 |H| / (log2 n + log2 e)`.
pub fn sauer_lower(size_of_class: &BigUint, n: u64) -> Result<f64> {
    if size_of_class.is_zero() {
        return Err(invalid("class size must be at least 1"));
    }
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    Ok(log2_big(size_of_class) / ((n as f64).log2() + std::f64::consts::LOG2_E))
}

/// `log2` of an arbitrarily large positive integer.
pub fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits").log2();
    }
    let shift = bits - 64;
    (v >> shift).to_f64().expect("fits").log2() + shift as f64
}

/// Random architecture with dyadic weights in `[-2, 2]`, so sums are exact.
pub fn random_architecture(m: usize, d: usize, seed: u64) -> VarThresholdArchitecture {
    use rand::Rng;
    let mut rng = crate::rng::Streams::new(seed).stream(0);
    let mut w = move || f64::from(rng.random_range(-4i32..=4)) / 2.0;
    let gates = (0..m)
        .map(|i| VarGate {
            input_weights: (0..d).map(|_| w()).collect(),
            gate_weights: (0..i).map(|j| (j, w())).filter(|(_, x)| *x != 0.0).collect(),
        })
        .collect();
    VarThresholdArchitecture { d, gates }
}

/// `z` distinct random points of `{0,1}^d`.
pub fn random_samples(d: usize, z: usize, seed: u64) -> Result<SampleSet> {
    use rand::seq::SliceRandom;
    let mut cube = SampleSet::cube(d);
    if z > cube.len() {
        return Err(invalid(format!("cannot draw {z} distinct points from {}", cube.len())));
    }
    let mut rng = crate::rng::Streams::new(seed).stream(1);
    cube.shuffle(&mut rng);
    cube.truncate(z);
    SampleSet::new(d, cube)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Largest `z <= max_z` such that some `z` points of `{0,1}^d` are shattered.
pub fn vc_by_enumeration(arch: &VarThresholdArchitecture, max_z: usize) -> Result<usize> {
    arch.check()?;
    let cube = SampleSet::cube(arch.d);
    let domain = cube.len();
    let mut spent = 0u128;
    let mut best = 0;
    for z in 1..=max_z.min(domain) {
        spent = spent.saturating_add(binomial(domain as u128, z as u128));
        if spent > SUBSET_BUDGET {
            return Err(Error::Budget {
                needed: spent,
                limit: SUBSET_BUDGET,
            });
        }
        let full = 1u128 << z;
        let mut found = false;
        for subset in Combinations::new(domain, z) {
            let points = subset.iter().map(|&i| cube[i].clone()).collect();
            let s = SampleSet { d: arch.d, points };
            if count_dichotomies(arch, &s)?.count == full {
                found = true;
                break;
            }
        }
        if !found {
            // Subsets of shattered sets are shattered, so nothing larger works.
            break;
        }
        best = z;
    }
    Ok(best)
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(s: &[&str]) -> Vec<Vec<bool>> {
        s.iter()
            .map(|p| p.chars().map(|c| c == '1').collect())
            .collect()
    }

    #[test]
    fn single_gate_distinct_preactivations() {
        let arch = VarThresholdArchitecture::single_gate(vec![1.0, 2.0]);
        let s = SampleSet::new(2, pts(&["10", "01", "11"])).unwrap();
        assert_eq!(count_dichotomies(&arch, &s).unwrap().count, 4);
    }

    #[test]
    fn empty_sample_set_has_one_labeling() {
        let arch = VarThresholdArchitecture::single_gate(vec![1.0]);
        let s = SampleSet::new(1, vec![]).unwrap();
        assert_eq!(count_dichotomies(&arch, &s).unwrap().count, 1);
    }

    #[test]
    fn duplicate_samples_rejected() {
        assert!(SampleSet::new(2, pts(&["10", "10"])).is_err());
    }

    #[test]
    fn budget_guard() {
        let gates = (0..8)
            .map(|_| VarGate {
                input_weights: vec![1.0; 4],
                gate_weights: vec![],
            })
            .collect();
        let arch = VarThresholdArchitecture::new(4, gates).unwrap();
        let s = SampleSet::new(4, SampleSet::cube(4)).unwrap();
        assert!(matches!(count_dichotomies(&arch, &s), Err(Error::Budget { .. })));
    }

    #[test]
    fn bound_calculators() {
        assert_eq!(baum_product_bound(&[3, 4]), BigUint::from(12u32));
        assert_eq!(baum_product_bound(&[7]), BigUint::from(7u32));
        assert_eq!(circuit_vc_upper(2).unwrap(), 6.0);
        assert_eq!(circuit_vc_upper(4).unwrap(), 24.0);
        assert_eq!(circuit_vc_upper(8).unwrap(), 72.0);
        assert!(circuit_vc_upper(1).is_err());
        let v = sauer_lower(&(BigUint::from(1u32) << 15), 16).unwrap();
        assert!((v - 15.0 / (4.0 + 1.0 / std::f64::consts::LN_2)).abs() < 1e-12, "{v}");
        assert!((v - 2.756).abs() < 5e-4);
        let v = sauer_lower(&BigUint::from(2u32), 16).unwrap();
        assert!((v - 1.0 / (4.0 + std::f64::consts::LOG2_E)).abs() < 1e-12);
        let v = sauer_lower(&(BigUint::from(1u32) << 255), 256).unwrap();
        assert!((v - 27.005).abs() < 1e-3, "{v}");
        assert!(sauer_lower(&BigUint::from(0u32), 16).is_err());
    }

    #[test]
    fn huge_log2() {
        let v = BigUint::from(3u32) << 5000;
        assert!((log2_big(&v) - (5000.0 + 3f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn vc_single_gates() {
        let fixed = VarThresholdArchitecture::single_gate(vec![1.0, 2.0]);
        assert_eq!(vc_by_enumeration(&fixed, 4).unwrap(), 1);
        let zero = VarThresholdArchitecture::single_gate(vec![0.0, 0.0]);
        assert!(vc_by_enumeration(&zero, 4).unwrap() <= 1);
    }

    #[test]
    fn combinations_enumerate_all() {
        let all: Vec<_> = Combinations::new(5, 2).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[9], vec![3, 4]);
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(binomial(16, 3), 560);
    }
}
