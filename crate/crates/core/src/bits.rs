//! Bit-vector helpers. Position 0 is the least significant bit everywhere.

use crate::error::{invalid, Result};

/// Integer encoded by `bits`, `bits[0]` least significant.
pub fn dec(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(0u64, |acc, (i, _)| acc | (1u64 << i))
}

/// Fixed-width binary encoding of `value`, inverse of [`dec`].
pub fn bin(value: u64, width: usize) -> Result<Vec<bool>> {
    if width < 64 && value >> width != 0 {
        return Err(invalid(format!("{value} does not fit in {width} bits")));
    }
    Ok((0..width).map(|i| i < 64 && (value >> i) & 1 == 1).collect())
}

/// Parses a `0`/`1` string, index 0 leftmost.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(invalid(format!("bit string contains {other:?}"))),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Exact base-2 logarithm of a power of two.
pub fn exact_log2(n: usize) -> Option<u32> {
    (n.is_power_of_two()).then(|| n.trailing_zeros())
}
