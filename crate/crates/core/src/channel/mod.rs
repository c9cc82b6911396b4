//! Deletion-channel simulation and mean profiles.
//!
//! A trace of `x` keeps each bit independently with probability `q = 1 - p`.
//! The mean profile is `E_j(x) = E[x̃_j]` for `j = 0..n`, with `x̃_j = 0`
//! past the end of the trace, and has the closed form
//! `E_j = Σ_k binom(k, j) p^{k-j} q^{j+1} x_k`.

mod io;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polynomial::binomial;
use crate::polynomial::circle::ratio_to_f64;
use crate::polynomial::CircleParams;
use crate::strings::BitString;

/// Uniform double in `[0, 1)` from the top 53 bits of a word.
fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Calls `keep(bit)` for every bit of `x` that survives in trace `index`.
///
/// The coin for source bit `i` of trace `t` is the `i`-th word of the ChaCha8
/// stream `t` under key `seed`, so a trace depends on `(seed, index)` only.
fn for_each_kept(x: &BitString, q: f64, seed: u64, index: u64, mut keep: impl FnMut(u8)) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for &bit in x.bits() {
        if unit_f64(rng.next_u64()) < q {
            keep(bit);
        }
    }
}

/// Trace number `index` of `x` under key `seed`.
pub fn sample_trace(x: &BitString, circle: &CircleParams, seed: u64, index: u64) -> BitString {
    let mut bits = Vec::with_capacity(x.len());
    for_each_kept(x, circle.q(), seed, index, |b| bits.push(b));
    BitString::from_bits(bits).expect("trace bits come from a bit string")
}

/// Per-position expectations `E_0 .. E_{n-1}` (exact or estimated).
#[derive(Clone, Debug, PartialEq)]
pub struct MeanProfile {
    pub values: Vec<f64>,
    pub circle: CircleParams,
}

impl MeanProfile {
    pub fn source_len(&self) -> usize {
        self.values.len()
    }

    /// `Σ_j |self_j - other_j|`.
    pub fn l1_distance(&self, other: &MeanProfile) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// `max_j |self_j - other_j|`.
    pub fn linf_distance(&self, other: &MeanProfile) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_j binom(j, k) E_j`, the potential `Φ_k` evaluated on the profile.
    pub fn potential(&self, k: usize) -> f64 {
        self.values
            .iter()
            .enumerate()
            .skip(k)
            .map(|(j, e)| {
                binomial(j as u64, k as u64)
                    .to_f64()
                    .unwrap_or(f64::INFINITY)
                    * e
            })
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profiles serialize")
    }
}

/// JSON form: plain array of decimal floats.
impl Serialize for MeanProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(serializer)
    }
}

/// A set of traces of one source string length.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceBatch {
    source_len: usize,
    traces: Vec<BitString>,
    seed: u64,
    circle: CircleParams,
}

impl TraceBatch {
    pub fn new(
        source_len: usize,
        traces: Vec<BitString>,
        seed: u64,
        circle: CircleParams,
    ) -> Result<Self> {
        if let Some(t) = traces.iter().find(|t| t.len() > source_len) {
            return Err(Error::Parse(format!(
                "trace of length {} exceeds source length {source_len}",
                t.len()
            )));
        }
        Ok(Self {
            source_len,
            traces,
            seed,
            circle,
        })
    }

    /// Traces `0..count` of `x` under key `seed`.
    pub fn sample(x: &BitString, circle: &CircleParams, seed: u64, count: usize) -> Self {
        let traces = sample_many(x, circle, seed, count);
        Self {
            source_len: x.len(),
            traces,
            seed,
            circle: circle.clone(),
        }
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn traces(&self) -> &[BitString] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn circle(&self) -> &CircleParams {
        &self.circle
    }
}

#[cfg(feature = "parallel")]
fn sample_many(x: &BitString, circle: &CircleParams, seed: u64, count: usize) -> Vec<BitString> {
    use rayon::prelude::*;
    (0..count as u64)
        .into_par_iter()
        .map(|t| sample_trace(x, circle, seed, t))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn sample_many(x: &BitString, circle: &CircleParams, seed: u64, count: usize) -> Vec<BitString> {
    (0..count as u64)
        .map(|t| sample_trace(x, circle, seed, t))
        .collect()
}

/// Running per-position counts of ones over a stream of traces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProfileAccumulator {
    counts: Vec<u64>,
    traces: u64,
}

impl ProfileAccumulator {
    pub fn new(source_len: usize) -> Self {
        Self {
            counts: vec![0; source_len],
            traces: 0,
        }
    }

    pub fn add(&mut self, trace: &BitString) {
        for (c, &b) in self.counts.iter_mut().zip(trace.bits()) {
            *c += u64::from(b);
        }
        self.traces += 1;
    }

    /// Integer counts add exactly, so merge order does not matter.
    pub fn merge(mut self, other: &ProfileAccumulator) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.traces += other.traces;
        self
    }

    pub fn traces(&self) -> u64 {
        self.traces
    }

    pub fn finish(&self, circle: &CircleParams) -> Result<MeanProfile> {
        if self.traces == 0 {
            return Err(Error::EmptyBatch);
        }
        let t = self.traces as f64;
        Ok(MeanProfile {
            values: self.counts.iter().map(|&c| c as f64 / t).collect(),
            circle: circle.clone(),
        })
    }
}

/// Position-wise average of the batch, zero-padded to the source length.
pub fn empirical_mean_profile(batch: &TraceBatch) -> Result<MeanProfile> {
    let mut acc = ProfileAccumulator::new(batch.source_len);
    for t in &batch.traces {
        acc.add(t);
    }
    acc.finish(&batch.circle)
}

/// Empirical profile of traces `0..count` of `x`, without storing the traces.
///
/// Produces exactly the profile of `TraceBatch::sample(x, circle, seed, count)`.
pub fn simulate_profile(
    x: &BitString,
    circle: &CircleParams,
    seed: u64,
    count: u64,
) -> Result<MeanProfile> {
    accumulate(x, circle.q(), seed, count).finish(circle)
}

fn accumulate_range(
    x: &BitString,
    q: f64,
    seed: u64,
    range: std::ops::Range<u64>,
) -> ProfileAccumulator {
    let mut acc = ProfileAccumulator::new(x.len());
    for t in range {
        let mut pos = 0;
        let counts = &mut acc.counts;
        for_each_kept(x, q, seed, t, |b| {
            counts[pos] += u64::from(b);
            pos += 1;
        });
        acc.traces += 1;
    }
    acc
}

#[cfg(feature = "parallel")]
fn accumulate(x: &BitString, q: f64, seed: u64, count: u64) -> ProfileAccumulator {
    use rayon::prelude::*;
    const CHUNK: u64 = 1 << 14;
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| accumulate_range(x, q, seed, c * CHUNK..((c + 1) * CHUNK).min(count)))
        .reduce(|| ProfileAccumulator::new(x.len()), |a, b| a.merge(&b))
}

#[cfg(not(feature = "parallel"))]
fn accumulate(x: &BitString, q: f64, seed: u64, count: u64) -> ProfileAccumulator {
    accumulate_range(x, q, seed, 0..count)
}

/// Exact profile numerators over the common denominator `b^n`, for `p = a/b`:
/// `E_j b^n = Σ_k binom(k, j) a^{k-j} (b-a)^{j+1} b^{n-k-1} w_k`, where `w`
/// is an integer weight vector (a string, or a difference of two strings).
fn profile_numerators(weights: &[i64], p: &BigRational) -> (Vec<BigInt>, BigInt) {
    let n = weights.len();
    let a = p.numer().clone();
    let b = p.denom().clone();
    let c = &b - &a;
    let pow_table = |base: &BigInt| {
        let mut v = Vec::with_capacity(n + 1);
        let mut acc = BigInt::one();
        for _ in 0..=n {
            v.push(acc.clone());
            acc *= base;
        }
        v
    };
    let (pa, pc, pb) = (pow_table(&a), pow_table(&c), pow_table(&b));

    let mut nums = vec![BigInt::zero(); n];
    // Pascal row k, grown in place.
    let mut row: Vec<BigInt> = vec![BigInt::one()];
    for (k, &w) in weights.iter().enumerate() {
        if k > 0 {
            row.push(BigInt::one());
            for j in (1..k).rev() {
                let prev = row[j - 1].clone();
                row[j] += prev;
            }
        }
        if w == 0 {
            continue;
        }
        let tail = &pb[n - k - 1] * BigInt::from(w);
        for j in 0..=k {
            nums[j] += &row[j] * &pa[k - j] * &pc[j + 1] * &tail;
        }
    }
    (nums, pb[n].clone())
}

/// `E_j(x)` as exact rationals for `p` given exactly.
pub fn exact_mean_profile_ratio(x: &BitString, p: &BigRational) -> Vec<BigRational> {
    let weights: Vec<i64> = x.bits().iter().map(|&b| i64::from(b)).collect();
    let (nums, den) = profile_numerators(&weights, p);
    nums.into_iter()
        .map(|num| BigRational::new(num, den.clone()))
        .collect()
}

/// Closed-form mean profile. Exact rational arithmetic when `p` is known
/// exactly, otherwise the binomial-law recurrence
/// `P_k(j) = p P_{k-1}(j) + q P_{k-1}(j-1)` in binary64 with compensated sums.
pub fn exact_mean_profile(x: &BitString, circle: &CircleParams) -> MeanProfile {
    let values = match circle.exact_p() {
        Some(p) => exact_mean_profile_ratio(x, p)
            .iter()
            .map(ratio_to_f64)
            .collect(),
        None => float_profile(x, circle.p(), circle.q()),
    };
    MeanProfile {
        values,
        circle: circle.clone(),
    }
}

fn float_profile(x: &BitString, p: f64, q: f64) -> Vec<f64> {
    let n = x.len();
    let mut sums = vec![NeumaierSum::default(); n];
    // law[j] = Pr[bit k lands at position j | bit k kept] = binom(k, j) q^j p^{k-j}
    let mut law = vec![0.0f64; n];
    for (k, &bit) in x.bits().iter().enumerate() {
        if k == 0 {
            law[0] = 1.0;
        } else {
            for j in (0..=k).rev() {
                let stay = if j < k { p * law[j] } else { 0.0 };
                let shift = if j > 0 { q * law[j - 1] } else { 0.0 };
                law[j] = stay + shift;
            }
        }
        if bit == 1 {
            for j in 0..=k {
                sums[j].add(q * law[j]);
            }
        }
    }
    sums.iter().map(NeumaierSum::value).collect()
}

#[derive(Clone, Copy, Debug, Default)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// `Σ_j |E_j(x) - E_j(y)|`, computed from exact differences when `p` is exact.
pub fn profile_l1_separation(x: &BitString, y: &BitString, circle: &CircleParams) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::UnequalLengths {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(match circle.exact_p() {
        Some(p) => {
            let diff: Vec<i64> = x
                .bits()
                .iter()
                .zip(y.bits())
                .map(|(&a, &b)| i64::from(a) - i64::from(b))
                .collect();
            let (nums, den) = profile_numerators(&diff, p);
            let total: BigInt = nums.iter().map(|v| v.abs()).sum();
            ratio_to_f64(&BigRational::new(total, den))
        }
        None => exact_mean_profile(x, circle).l1_distance(&exact_mean_profile(y, circle)),
    })
}

/// `Σ_j binom(j, k) x_j`, an exact integer.
pub fn potential_sum(x: &BitString, k: usize) -> BigUint {
    x.ones()
        .into_iter()
        .map(|j| binomial(j as u64, k as u64))
        .sum()
}

fn check_potential_index(x: &BitString, k: usize) -> Result<()> {
    if k >= x.len().max(1) {
        return Err(Error::PotentialOutOfRange { k, n: x.len() });
    }
    Ok(())
}

/// `E[Φ_k(x̃)] = q^{k+1} Σ_j binom(j, k) x_j` as an exact rational.
pub fn exact_potential_expectation_ratio(
    x: &BitString,
    q: &BigRational,
    k: usize,
) -> Result<BigRational> {
    check_potential_index(x, k)?;
    let sum = BigInt::from(potential_sum(x, k));
    Ok(q.pow(k as i32 + 1) * BigRational::from_integer(sum))
}

/// `E[Φ_k(x̃)]` for `Φ_k(x̃) = Σ_i binom(i, k) x̃_i`.
pub fn exact_potential_expectation(x: &BitString, circle: &CircleParams, k: usize) -> Result<f64> {
    match circle.exact_q() {
        Some(q) => Ok(ratio_to_f64(&exact_potential_expectation_ratio(x, &q, k)?)),
        None => {
            check_potential_index(x, k)?;
            let sum = potential_sum(x, k).to_f64().unwrap_or(f64::INFINITY);
            Ok(circle.q().powi(k as i32 + 1) * sum)
        }
    }
}

pub use io::{read_traces, write_traces};
