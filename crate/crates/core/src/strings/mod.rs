//! Bit strings, Hamming and indel edit distances, and block decompositions of
//! string pairs.

mod blocks;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use blocks::{block_decompose, Block, BlockCase, BlockDecomposition};

/// A finite string over `{0, 1}`, indexed from 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a string from 0/1 values; any nonzero byte is an error.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(position) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidBit {
                position,
                found: char::from(b'0'.saturating_add(bits[position])),
            });
        }
        Ok(Self { bits })
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self {
            bits: bits.into_iter().map(u8::from).collect(),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    /// `pattern` repeated `times` times.
    pub fn repeat(pattern: &BitString, times: usize) -> Self {
        Self {
            bits: pattern.bits.repeat(times),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(u8::from(bit));
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Positions holding a one, in increasing order.
    pub fn ones(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == 1).then_some(i))
            .collect()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString {
            bits: self.bits[start..end].to_vec(),
        }
    }

    /// Copy with bit `i` flipped.
    pub fn flipped(&self, i: usize) -> BitString {
        let mut bits = self.bits.clone();
        bits[i] ^= 1;
        BitString { bits }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .enumerate()
            .map(|(position, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                found => Err(Error::InvalidBit { position, found }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .bits
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of positions at which `x` and `y` differ.
pub fn hamming_distance(x: &BitString, y: &BitString) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::UnequalLengths {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.bits.iter().zip(&y.bits).filter(|(a, b)| a != b).count())
}

/// Length of a longest common subsequence, by the row-rolling dynamic program.
pub fn lcs_len(x: &BitString, y: &BitString) -> usize {
    let (x, y) = (x.bits(), y.bits());
    let mut prev = vec![0usize; y.len() + 1];
    let mut cur = vec![0usize; y.len() + 1];
    for &a in x {
        for (j, &b) in y.iter().enumerate() {
            cur[j + 1] = if a == b {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()]
}

/// Minimum number of insertions and deletions turning `x` into `y`
/// (no substitutions): `|x| + |y| - 2 LCS(x, y)`.
pub fn edit_distance(x: &BitString, y: &BitString) -> usize {
    x.len() + y.len() - 2 * lcs_len(x, y)
}

/// Whether `edit_distance(x, y) <= bound`, in `O((|x| + |y|) bound)` time.
///
/// Any alignment of cost at most `bound` stays within `bound` of the
/// diagonal, so the dynamic program only visits that band.
pub fn edit_distance_at_most(x: &BitString, y: &BitString, bound: usize) -> bool {
    let (x, y) = (x.bits(), y.bits());
    if x.len().abs_diff(y.len()) > bound {
        return false;
    }
    let inf = usize::MAX / 2;
    let width = 2 * bound + 1;
    // Row i stores columns j = i - bound + t for t in 0..width.
    let col = |i: usize, t: usize| (i + t).checked_sub(bound);
    let mut prev = vec![inf; width];
    for (t, v) in prev.iter_mut().enumerate() {
        if let Some(j) = col(0, t) {
            if j <= y.len() {
                *v = j;
            }
        }
    }
    for i in 1..=x.len() {
        let mut cur = vec![inf; width];
        for t in 0..width {
            let Some(j) = col(i, t) else { continue };
            if j > y.len() {
                break;
            }
            let mut best = if t + 1 < width { prev[t + 1] + 1 } else { inf };
            if j == 0 {
                best = best.min(i);
            } else {
                if t > 0 {
                    best = best.min(cur[t - 1] + 1);
                }
                if x[i - 1] == y[j - 1] {
                    best = best.min(prev[t]);
                }
            }
            cur[t] = best;
        }
        prev = cur;
    }
    let t = y.len() + bound - x.len();
    prev[t] <= bound
}
