//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use neuroram::vc::{SampleSet, VarThresholdArchitecture};

/// Dichotomy count by brute force over a dense threshold grid.
///
/// For each gate the grid holds every pre-activation value the gate can
/// take on any sample under any pattern of earlier gates, the same values
/// nudged up by `eps`, and one value below them all. Weights must make
/// distinct sums differ by more than `eps`.
pub fn grid_dichotomies(arch: &VarThresholdArchitecture, samples: &SampleSet, eps: f64) -> usize {
    let m = arch.m();
    let grids: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut vals = Vec::new();
            for x in &samples.points {
                for pattern in 0..1u32 << i {
                    let upstream: Vec<bool> = (0..i).map(|j| pattern >> j & 1 == 1).collect();
                    vals.push(arch.preactivation(i, x, &upstream));
                }
            }
            let low = vals.iter().copied().fold(0.0f64, f64::min) - 1.0;
            let mut grid: Vec<f64> = vals.iter().flat_map(|&v| [v, v + eps]).collect();
            grid.push(low);
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            grid
        })
        .collect();
    let mut seen = HashSet::new();
    let mut theta = vec![0.0; m];
    let mut idx = vec![0usize; m];
    loop {
        for g in 0..m {
            theta[g] = grids[g][idx[g]];
        }
        let labels: Vec<bool> = samples.points.iter().map(|x| arch.eval(&theta, x)).collect();
        seen.insert(labels);
        let mut g = 0;
        loop {
            if g == m {
                return seen.len();
            }
            idx[g] += 1;
            if idx[g] < grids[g].len() {
                break;
            }
            idx[g] = 0;
            g += 1;
        }
    }
}

/// `2 * dec(reverse(bucket))`, computed bit by bit.
pub fn twice_reversed_value(bucket: &[bool]) -> u128 {
    let mut v = 0u128;
    for &b in bucket {
        v = v * 2 + u128::from(b);
    }
    2 * v
}
