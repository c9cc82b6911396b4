//! Decomposition of an equal-length pair `(x, y)` into contiguous blocks where
//! each block pair is one of five shapes:
//!
//! | case | x-block | y-block | condition |
//! |------|---------|---------|-----------|
//! | 1    | `s`     | `s`     |           |
//! | 2    | `a s`   | `s b`   |           |
//! | 3    | `s a`   | `b s`   |           |
//! | 4    | `a s`   | `b s`   | `a != b`  |
//! | 5    | `s a`   | `s b`   | `a != b`  |
//!
//! A pair with such a decomposition into `d` blocks and equal weights has
//! `Q_x - Q_y` vanishing at 1 to order at most `3d`.

use serde::{Serialize, Serializer};

use super::BitString;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockCase {
    /// `x_i = y_i`.
    Equal,
    /// `x_i = a s`, `y_i = s b`.
    ShiftForward,
    /// `x_i = s a`, `y_i = b s`.
    ShiftBackward,
    /// `x_i = a s`, `y_i = b s`, `a != b`.
    HeadFlip,
    /// `x_i = s a`, `y_i = s b`, `a != b`.
    TailFlip,
}

impl BlockCase {
    pub const ALL: [BlockCase; 5] = [
        BlockCase::Equal,
        BlockCase::ShiftForward,
        BlockCase::ShiftBackward,
        BlockCase::HeadFlip,
        BlockCase::TailFlip,
    ];

    /// Case number 1..=5.
    pub fn label(self) -> u8 {
        match self {
            BlockCase::Equal => 1,
            BlockCase::ShiftForward => 2,
            BlockCase::ShiftBackward => 3,
            BlockCase::HeadFlip => 4,
            BlockCase::TailFlip => 5,
        }
    }

    /// Direct pattern check of one block pair, straight from the table.
    pub fn matches(self, xb: &[u8], yb: &[u8]) -> bool {
        let l = xb.len();
        if l == 0 || yb.len() != l {
            return false;
        }
        match self {
            BlockCase::Equal => xb == yb,
            BlockCase::ShiftForward => xb[1..] == yb[..l - 1],
            BlockCase::ShiftBackward => xb[..l - 1] == yb[1..],
            BlockCase::HeadFlip => xb[0] != yb[0] && xb[1..] == yb[1..],
            BlockCase::TailFlip => xb[l - 1] != yb[l - 1] && xb[..l - 1] == yb[..l - 1],
        }
    }
}

impl Serialize for BlockCase {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.label())
    }
}

/// One block with its payload: the shared string `s` and, for cases 2-5, the
/// distinguished bits `a` (in `x`) and `b` (in `y`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub start: usize,
    pub len: usize,
    pub case: BlockCase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u8>,
    pub s: BitString,
}

impl Block {
    fn build(x: &[u8], y: &[u8], start: usize, len: usize, case: BlockCase) -> Block {
        let end = start + len;
        let seg = |lo: usize, hi: usize| BitString {
            bits: x[lo..hi].to_vec(),
        };
        let (a, b, s) = match case {
            BlockCase::Equal => (None, None, seg(start, end)),
            BlockCase::ShiftForward | BlockCase::HeadFlip => {
                let b = if case == BlockCase::HeadFlip {
                    y[start]
                } else {
                    y[end - 1]
                };
                (Some(x[start]), Some(b), seg(start + 1, end))
            }
            BlockCase::ShiftBackward | BlockCase::TailFlip => {
                let b = if case == BlockCase::TailFlip {
                    y[end - 1]
                } else {
                    y[start]
                };
                (Some(x[end - 1]), Some(b), seg(start, end - 1))
            }
        };
        Block {
            start,
            len,
            case,
            a,
            b,
            s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Start indices `t_1 = 0, ..., t_{d+1} = n`.
    pub fn starts(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.blocks.iter().map(|b| b.start).collect();
        t.push(self.blocks.last().map_or(0, |b| b.start + b.len));
        t
    }

    /// Checks that the blocks tile `[0, n)` and each matches its case.
    pub fn validate(&self, x: &BitString, y: &BitString) -> bool {
        if x.len() != y.len() {
            return false;
        }
        let mut pos = 0;
        for blk in &self.blocks {
            if blk.start != pos || blk.len == 0 {
                return false;
            }
            let end = blk.start + blk.len;
            if end > x.len()
                || !blk
                    .case
                    .matches(&x.bits()[blk.start..end], &y.bits()[blk.start..end])
            {
                return false;
            }
            pos = end;
        }
        pos == x.len()
    }
}

/// First index `>= i` where `ok(i)` fails, for every `i`; `len` when none does.
fn next_failure(len: usize, ok: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut next = vec![len; len + 1];
    for i in (0..len).rev() {
        next[i] = if ok(i) { next[i + 1] } else { i };
    }
    next
}

/// Minimum-block decomposition of `(x, y)` with at most `d_max` blocks.
///
/// Among decompositions with the fewest blocks, blocks are chosen left to
/// right preferring the lowest case number and then the longest block.
/// Returns `Ok(None)` when more than `d_max` blocks would be needed.
pub fn block_decompose(
    x: &BitString,
    y: &BitString,
    d_max: usize,
) -> Result<Option<BlockDecomposition>> {
    if x.len() != y.len() {
        return Err(Error::UnequalLengths {
            left: x.len(),
            right: y.len(),
        });
    }
    let (xs, ys) = (x.bits(), y.bits());
    let n = xs.len();
    if n == 0 {
        return Ok(Some(BlockDecomposition { blocks: Vec::new() }));
    }

    // Run tables make each case test O(1).
    let same = next_failure(n, |t| xs[t] == ys[t]);
    let fwd = next_failure(n - 1, |t| xs[t + 1] == ys[t]);
    let bwd = next_failure(n - 1, |t| xs[t] == ys[t + 1]);
    let case_fits = |case: BlockCase, i: usize, j: usize| -> bool {
        // block [i, j), j > i
        match case {
            BlockCase::Equal => same[i] >= j,
            BlockCase::ShiftForward => j - i == 1 || fwd[i] >= j - 1,
            BlockCase::ShiftBackward => j - i == 1 || bwd[i] >= j - 1,
            BlockCase::HeadFlip => xs[i] != ys[i] && same[i + 1] >= j,
            BlockCase::TailFlip => xs[j - 1] != ys[j - 1] && same[i] >= j - 1,
        }
    };
    let fits_any = |i: usize, j: usize| BlockCase::ALL.iter().any(|&c| case_fits(c, i, j));

    const INF: usize = usize::MAX;
    let mut best = vec![INF; n + 1];
    best[n] = 0;
    for i in (0..n).rev() {
        for j in i + 1..=n {
            if best[j] != INF && best[j] + 1 < best[i] && fits_any(i, j) {
                best[i] = best[j] + 1;
            }
        }
    }
    if best[0] > d_max {
        return Ok(None);
    }

    let mut blocks = Vec::with_capacity(best[0]);
    let mut i = 0;
    while i < n {
        let (case, j) = BlockCase::ALL
            .iter()
            .flat_map(|&c| (i + 1..=n).rev().map(move |j| (c, j)))
            .find(|&(c, j)| best[j] != INF && best[j] + 1 == best[i] && case_fits(c, i, j))
            .ok_or_else(|| Error::Invariant("block reconstruction lost its path".into()))?;
        blocks.push(Block::build(xs, ys, i, j - i, case));
        i = j;
    }
    Ok(Some(BlockDecomposition { blocks }))
}
