//! Mean-based distinguishers.
//!
//! Both decide between two candidate sources `x` and `y` using only the
//! empirical mean profile of a trace batch:
//!
//! - the potential distinguisher compares `Φ̃_k = Σ_j binom(j, k) Ê_j` with the
//!   exact expectations `q^{k+1} Σ_j binom(j, k) x_j`, for the smallest `k` at
//!   which those expectations are at least `q^{k+1}` apart;
//! - the profile distinguisher picks the hypothesis whose exact profile is
//!   nearest to `Ê` in ℓ1 (or ℓ∞).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use serde::Serialize;

use crate::channel::{empirical_mean_profile, exact_mean_profile, exact_potential_expectation};
use crate::channel::{MeanProfile, TraceBatch};
use crate::error::{Error, Result};
use crate::polynomial::{binomial, CircleParams};
use crate::strings::{hamming_distance, BitString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mean,
    Potential,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileNorm {
    #[default]
    L1,
    Linf,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub choice: Hypothesis,
    /// `Φ̃_k` for the potential method; distance to the chosen profile for the
    /// mean method.
    pub statistic: f64,
    /// `| dist(X) - dist(Y) |`.
    pub margin: f64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "T")]
    pub traces: u64,
    /// Both hypotheses were exactly equidistant; `choice` is then `X`.
    pub tie: bool,
}

impl Decision {
    fn from_distances(
        dist_x: f64,
        dist_y: f64,
        statistic: impl FnOnce(Hypothesis) -> f64,
        method: Method,
        k: Option<usize>,
        traces: u64,
    ) -> Self {
        let choice = if dist_y < dist_x {
            Hypothesis::Y
        } else {
            Hypothesis::X
        };
        Decision {
            choice,
            statistic: statistic(choice),
            margin: (dist_x - dist_y).abs(),
            method,
            k,
            traces,
            tie: dist_x == dist_y,
        }
    }
}

/// `Σ_j binom(j, k) (x_j - y_j)`; the potential gap is `q^{k+1}` times this.
fn potential_difference(x: &BitString, y: &BitString, k: usize) -> BigInt {
    x.bits()
        .iter()
        .zip(y.bits())
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(j, (&a, &b))| {
            let c = BigInt::from(binomial(j as u64, k as u64));
            if a > b {
                c
            } else {
                -c
            }
        })
        .sum()
}

/// Smallest `k ≤ d - 1` with `|E[Φ_k(x̃)] - E[Φ_k(ỹ)]| ≥ q^{k+1}`.
///
/// The gap equals `q^{k+1} |Σ_j binom(j, k)(x_j - y_j)|` with an integer sum,
/// so the test is whether that sum is nonzero. Such a `k` always exists for
/// distinct strings within Hamming distance `d`, because the matrix
/// `[binom(j_i, k)]` over the differing positions is nonsingular.
pub fn select_k(x: &BitString, y: &BitString, circle: &CircleParams, d: usize) -> Result<usize> {
    let dist = hamming_distance(x, y)?;
    if dist == 0 {
        return Err(Error::IdenticalStrings);
    }
    if dist > d {
        return Err(Error::HammingBoundExceeded {
            actual: dist,
            bound: d,
        });
    }
    if circle.q() <= 0.0 {
        return Err(Error::InvalidProbability(circle.to_string()));
    }
    (0..d)
        .find(|&k| !potential_difference(x, y, k).is_zero())
        .ok_or_else(|| {
            Error::Invariant(format!(
                "no potential index below {d} separates {x} and {y}"
            ))
        })
}

/// `|E[Φ_k(x̃)] - E[Φ_k(ỹ)]|` as an exact rational.
pub fn potential_gap_ratio(x: &BitString, y: &BitString, q: &BigRational, k: usize) -> BigRational {
    let diff = potential_difference(x, y, k);
    q.pow(k as i32 + 1) * BigRational::from_integer(diff.magnitude().clone().into())
}

/// `⌈10 (n/q)^{2(d+2)}⌉`, the trace count sufficient for the potential
/// distinguisher on pairs within Hamming distance `d`.
pub fn required_samples(n: u64, d: u32, circle: &CircleParams) -> BigUint {
    let q = circle
        .exact_q()
        .or_else(|| BigRational::from_f64(circle.q()))
        .unwrap_or_else(BigRational::one);
    let ratio = BigRational::from_integer(BigInt::from(n)) / q;
    let t = ratio.pow(2 * (d as i32 + 2)) * BigRational::from_integer(BigInt::from(10));
    t.ceil()
        .to_integer()
        .to_biguint()
        .expect("sample count is positive")
}

fn check_pair(profile: &MeanProfile, x: &BitString, y: &BitString) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::UnequalLengths {
            left: x.len(),
            right: y.len(),
        });
    }
    if x == y {
        return Err(Error::IdenticalStrings);
    }
    if profile.source_len() != x.len() {
        return Err(Error::BatchLengthMismatch {
            batch: profile.source_len(),
            strings: x.len(),
        });
    }
    Ok(())
}

/// Potential-function decision from an empirical profile built from `traces`
/// traces.
pub fn potential_decide(
    profile: &MeanProfile,
    traces: u64,
    x: &BitString,
    y: &BitString,
    circle: &CircleParams,
) -> Result<Decision> {
    check_pair(profile, x, y)?;
    let d = hamming_distance(x, y)?;
    let k = select_k(x, y, circle, d)?;
    let phi = profile.potential(k);
    let target_x = exact_potential_expectation(x, circle, k)?;
    let target_y = exact_potential_expectation(y, circle, k)?;
    Ok(Decision::from_distances(
        (phi - target_x).abs(),
        (phi - target_y).abs(),
        |_| phi,
        Method::Potential,
        Some(k),
        traces,
    ))
}

pub fn potential_distinguish(
    batch: &TraceBatch,
    x: &BitString,
    y: &BitString,
    circle: &CircleParams,
) -> Result<Decision> {
    let profile = empirical_mean_profile(batch)?;
    potential_decide(&profile, batch.len() as u64, x, y, circle)
}

/// Nearest-profile decision from an empirical profile.
pub fn mean_decide(
    profile: &MeanProfile,
    traces: u64,
    x: &BitString,
    y: &BitString,
    circle: &CircleParams,
    norm: ProfileNorm,
) -> Result<Decision> {
    check_pair(profile, x, y)?;
    let ex = exact_mean_profile(x, circle);
    let ey = exact_mean_profile(y, circle);
    let dist = |e: &MeanProfile| match norm {
        ProfileNorm::L1 => profile.l1_distance(e),
        ProfileNorm::Linf => profile.linf_distance(e),
    };
    let (dx, dy) = (dist(&ex), dist(&ey));
    Ok(Decision::from_distances(
        dx,
        dy,
        |h| if h == Hypothesis::X { dx } else { dy },
        Method::Mean,
        None,
        traces,
    ))
}

/// ℓ1 nearest-profile distinguisher.
pub fn mean_based_distinguish(
    batch: &TraceBatch,
    x: &BitString,
    y: &BitString,
    circle: &CircleParams,
) -> Result<Decision> {
    mean_based_distinguish_with(batch, x, y, circle, ProfileNorm::L1)
}

pub fn mean_based_distinguish_with(
    batch: &TraceBatch,
    x: &BitString,
    y: &BitString,
    circle: &CircleParams,
    norm: ProfileNorm,
) -> Result<Decision> {
    let profile = empirical_mean_profile(batch)?;
    mean_decide(&profile, batch.len() as u64, x, y, circle, norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{exact_potential_expectation_ratio, simulate_profile};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn select_k_examples() {
        let c = CircleParams::half();
        assert_eq!(select_k(&bs("1"), &bs("0"), &c, 1).unwrap(), 0);
        assert_eq!(select_k(&bs("10"), &bs("01"), &c, 2).unwrap(), 1);
        assert_eq!(select_k(&bs("110"), &bs("011"), &c, 2).unwrap(), 1);
        assert!(matches!(
            select_k(&bs("10"), &bs("10"), &c, 2),
            Err(Error::IdenticalStrings)
        ));
        assert!(matches!(
            select_k(&bs("10"), &bs("01"), &c, 1),
            Err(Error::HammingBoundExceeded {
                actual: 2,
                bound: 1
            })
        ));
    }

    #[test]
    fn gap_matches_difference_of_expectations() {
        let q = BigRational::new(1.into(), 2.into());
        let (x, y) = (bs("110"), bs("011"));
        for k in 0..3 {
            let direct = exact_potential_expectation_ratio(&x, &q, k).unwrap()
                - exact_potential_expectation_ratio(&y, &q, k).unwrap();
            let direct = if direct < BigRational::zero() {
                -direct
            } else {
                direct
            };
            assert_eq!(potential_gap_ratio(&x, &y, &q, k), direct);
        }
        assert_eq!(
            potential_gap_ratio(&x, &y, &q, 1),
            BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn required_samples_examples() {
        assert_eq!(
            required_samples(1, 1, &CircleParams::unit()),
            BigUint::from(10u32)
        );
        let half = CircleParams::half();
        assert_eq!(required_samples(2, 2, &half), BigUint::from(655_360u32));
        let big = BigUint::from(10u32) * BigUint::from(100u32).pow(10);
        assert_eq!(required_samples(50, 3, &half), big);
        assert_eq!(
            required_samples(2, 2, &CircleParams::new(0.5).unwrap()),
            BigUint::from(655_360u32)
        );
    }

    #[test]
    fn noiseless_batches_decide_correctly() {
        let c = CircleParams::unit();
        let (x, y) = (bs("1001110"), bs("0111001"));
        let batch = TraceBatch::new(7, vec![x.clone()], 0, c.clone()).unwrap();
        let d = potential_distinguish(&batch, &x, &y, &c).unwrap();
        assert_eq!(d.choice, Hypothesis::X);
        let k = d.k.unwrap();
        let gap = (exact_potential_expectation(&x, &c, k).unwrap()
            - exact_potential_expectation(&y, &c, k).unwrap())
        .abs();
        assert_eq!(d.margin, gap);
        assert!(!d.tie);

        let m = mean_based_distinguish(&batch, &x, &y, &c).unwrap();
        assert_eq!(m.choice, Hypothesis::X);
        assert_eq!(m.statistic, 0.0);
    }

    #[test]
    fn distinguishes_short_pair_from_traces() {
        let c = CircleParams::half();
        let (x, y) = (bs("10"), bs("01"));
        for seed in 0..5 {
            let from_x = simulate_profile(&x, &c, seed, 1_000_000).unwrap();
            let d = potential_decide(&from_x, 1_000_000, &x, &y, &c).unwrap();
            assert_eq!((d.choice, d.k), (Hypothesis::X, Some(1)));
            let from_y = simulate_profile(&y, &c, seed, 1_000_000).unwrap();
            let d = potential_decide(&from_y, 1_000_000, &x, &y, &c).unwrap();
            assert_eq!(d.choice, Hypothesis::Y);
        }
    }

    #[test]
    fn mean_distinguisher_converges() {
        let c = CircleParams::half();
        let (x, y) = (bs("1101001"), bs("1011001"));
        let sep = exact_mean_profile(&x, &c).l1_distance(&exact_mean_profile(&y, &c));
        let prof = simulate_profile(&x, &c, 4, 400_000).unwrap();
        for norm in [ProfileNorm::L1, ProfileNorm::Linf] {
            let d = mean_decide(&prof, 400_000, &x, &y, &c, norm).unwrap();
            assert_eq!(d.choice, Hypothesis::X);
        }
        let d = mean_decide(&prof, 400_000, &x, &y, &c, ProfileNorm::L1).unwrap();
        assert!(d.statistic < 0.02);
        assert!((d.margin - sep).abs() < 0.03);
    }

    #[test]
    fn tie_returns_x_with_flag() {
        // A profile halfway between the two exact profiles.
        let c = CircleParams::unit();
        let (x, y) = (bs("10"), bs("01"));
        let mid = MeanProfile {
            values: vec![0.5, 0.5],
            circle: c.clone(),
        };
        for d in [
            mean_decide(&mid, 2, &x, &y, &c, ProfileNorm::L1).unwrap(),
            potential_decide(&mid, 2, &x, &y, &c).unwrap(),
        ] {
            assert_eq!(d.choice, Hypothesis::X);
            assert!(d.tie);
            assert_eq!(d.margin, 0.0);
        }
    }

    #[test]
    fn swapping_hypotheses_flips_the_choice() {
        let c = CircleParams::half();
        let (x, y) = (bs("0110100"), bs("0101100"));
        let prof = simulate_profile(&x, &c, 12, 20_000).unwrap();
        let a = potential_decide(&prof, 20_000, &x, &y, &c).unwrap();
        let b = potential_decide(&prof, 20_000, &y, &x, &c).unwrap();
        assert!(!a.tie);
        assert_ne!(a.choice, b.choice);
        let a = mean_decide(&prof, 20_000, &x, &y, &c, ProfileNorm::L1).unwrap();
        let b = mean_decide(&prof, 20_000, &y, &x, &c, ProfileNorm::L1).unwrap();
        assert_ne!(a.choice, b.choice);
    }

    #[test]
    fn decisions_depend_only_on_the_profile() {
        // Different trace multisets, same per-position means.
        let c = CircleParams::half();
        let (x, y) = (bs("110"), bs("011"));
        let a = TraceBatch::new(3, vec![bs("11"), bs("0")], 0, c.clone()).unwrap();
        let b = TraceBatch::new(3, vec![bs("10"), bs("01")], 9, c.clone()).unwrap();
        assert_eq!(
            empirical_mean_profile(&a).unwrap(),
            empirical_mean_profile(&b).unwrap()
        );
        assert_eq!(
            potential_distinguish(&a, &x, &y, &c).unwrap(),
            potential_distinguish(&b, &x, &y, &c).unwrap()
        );
        assert_eq!(
            mean_based_distinguish(&a, &x, &y, &c).unwrap(),
            mean_based_distinguish(&b, &x, &y, &c).unwrap()
        );
    }

    #[test]
    fn precondition_errors() {
        let c = CircleParams::half();
        let batch = TraceBatch::new(2, vec![bs("1")], 0, c.clone()).unwrap();
        assert!(matches!(
            potential_distinguish(&batch, &bs("10"), &bs("10"), &c),
            Err(Error::IdenticalStrings)
        ));
        assert!(matches!(
            mean_based_distinguish(&batch, &bs("100"), &bs("010"), &c),
            Err(Error::BatchLengthMismatch { .. })
        ));
        let empty = TraceBatch::new(2, vec![], 0, c.clone()).unwrap();
        assert!(matches!(
            potential_distinguish(&empty, &bs("10"), &bs("01"), &c),
            Err(Error::EmptyBatch)
        ));
    }

    #[test]
    fn decision_json_shape() {
        let c = CircleParams::unit();
        let batch = TraceBatch::new(2, vec![bs("10")], 0, c.clone()).unwrap();
        let d = potential_distinguish(&batch, &bs("10"), &bs("01"), &c).unwrap();
        let v: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert_eq!(v["choice"], "X");
        assert_eq!(v["method"], "potential");
        assert_eq!(v["k"], 1);
        assert_eq!(v["T"], 1);
        let m = mean_based_distinguish(&batch, &bs("10"), &bs("01"), &c).unwrap();
        let v: serde_json::Value = serde_json::to_value(&m).unwrap();
        assert!(v.get("k").is_none());
    }
}
