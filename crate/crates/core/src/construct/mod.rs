//! Explicit hard pairs at edit distance four, PTE extraction, and the
//! aggregate pair analyzer.

mod analysis;
mod pairfile;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polynomial::{multiplicity_at_one, IntPolynomial};
use crate::strings::{edit_distance_at_most, BitString};

pub use analysis::{analyze_pair, analyze_pair_with, AnalysisOptions, BlockOutcome, PairAnalysis};
pub use pairfile::{PairFile, PairMeta};

/// Largest `k` accepted by [`cyclotomic_r`]; `3^{k+1}` must stay well inside
/// the address space.
pub const MAX_ORDER: u32 = 15;

fn check_order(k: u32) -> Result<()> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::InvalidOrder(k as i64));
    }
    if k > MAX_ORDER {
        return Err(Error::OrderTooLarge { k, max: MAX_ORDER });
    }
    Ok(())
}

/// `n = Σ_{j=0}^{k} 3^j`, the degree of `R`.
pub fn order_degree(k: u32) -> usize {
    (3usize.pow(k + 1) - 1) / 2
}

fn small_coeffs(k: u32) -> Vec<i8> {
    let n = order_degree(k);
    let mut c = vec![0i8; n + 1];
    c[0] = 1;
    let mut deg = 0;
    for j in 0..=k {
        let s = 3usize.pow(j);
        // Multiply in place by (1 - w^s), from the top down.
        for i in (s..=deg + s).rev() {
            c[i] -= c[i - s];
        }
        deg += s;
    }
    c
}

/// `R(w) = ∏_{j=0}^{k} (1 - w^{3^j})` for odd `k`.
pub fn cyclotomic_r(k: u32) -> Result<IntPolynomial> {
    check_order(k)?;
    let c = small_coeffs(k);
    for (i, &v) in c.iter().enumerate() {
        let sign_ok = if i % 2 == 0 { v >= 0 } else { v <= 0 };
        if !(-1..=1).contains(&v) || !sign_ok {
            return Err(Error::Invariant(format!(
                "R coefficient {v} at degree {i} breaks the sign pattern"
            )));
        }
    }
    Ok(IntPolynomial::new(
        c.into_iter().map(BigInt::from).collect(),
    ))
}

/// `E_n(w) = Σ_{j=0}^{n/2} w^{2j}` for even `n`.
pub fn even_indicator(n: usize) -> IntPolynomial {
    let mut c = vec![BigInt::zero(); n + 1];
    for v in c.iter_mut().step_by(2) {
        *v = BigInt::one();
    }
    IntPolynomial::new(c)
}

/// A hard pair `x = a·10·e`, `y = a·e·01` with `Q_e = E_n - R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardPairSpec {
    pub k: u32,
    pub n: usize,
    pub prefix: BitString,
    /// `n + 1` bits; the last is always 0.
    pub e: BitString,
    pub x: BitString,
    pub y: BitString,
    #[serde(skip)]
    pub r: IntPolynomial,
}

impl HardPairSpec {
    /// `-w^m (w^2 - 1) R(w)`, which must equal `Q_x - Q_y`.
    pub fn predicted_difference(&self) -> IntPolynomial {
        let one_minus_w2 = IntPolynomial::from_i64s(&[1, 0, -1]);
        (&one_minus_w2 * &self.r).shift(self.prefix.len())
    }

    pub fn predicted_multiplicity(&self) -> usize {
        self.k as usize + 2
    }

    pub fn verify(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Invariant(format!("hard pair k={}: {what}", self.k)));
        if !self.n.is_multiple_of(2) {
            return fail("n is odd");
        }
        if self.e.len() != self.n + 1 || self.e.get(self.n) != Some(0) {
            return fail("e must have n+1 bits ending in 0");
        }
        let m = self.prefix.len();
        if self.x.len() != m + self.n + 3 || self.y.len() != self.x.len() {
            return fail("lengths differ from m+n+3");
        }
        let q_e = &even_indicator(self.n) - &self.r;
        if !q_e.coeffs().iter().all(|c| c.is_zero() || c.is_one())
            || q_e.degree().is_some_and(|d| d + 1 > self.n)
        {
            return fail("Q_e is not a 0/1 polynomial of degree below n");
        }
        if IntPolynomial::from_string(&self.e) != q_e {
            return fail("e does not spell Q_e");
        }
        if !edit_distance_at_most(&self.x, &self.y, 4) {
            return fail("edit distance exceeds 4");
        }
        let diff = &IntPolynomial::from_string(&self.x) - &IntPolynomial::from_string(&self.y);
        if diff != self.predicted_difference() {
            return fail("Q_x - Q_y differs from -w^m (w^2-1) R");
        }
        Ok(())
    }
}

/// Builds and verifies the order-`k` hard pair behind prefix `a`.
pub fn hard_pair(k: u32, a: &BitString) -> Result<HardPairSpec> {
    let r = cyclotomic_r(k)?;
    let n = order_degree(k);
    let q_e = &even_indicator(n) - &r;
    let bits = (0..=n)
        .map(|i| {
            let c = q_e.coeff(i);
            if c.is_zero() {
                Ok(0)
            } else if c.is_one() {
                Ok(1)
            } else {
                Err(Error::Invariant(format!(
                    "Q_e coefficient {c} at degree {i} is not a bit"
                )))
            }
        })
        .collect::<Result<Vec<u8>>>()?;
    let e = BitString::from_bits(bits)?;
    let ten: BitString = "10".parse()?;
    let zero_one: BitString = "01".parse()?;
    let spec = HardPairSpec {
        k,
        n,
        x: a.concat(&ten).concat(&e),
        y: a.concat(&e).concat(&zero_one),
        prefix: a.clone(),
        e,
        r,
    };
    spec.verify()?;
    Ok(spec)
}

/// `x = (01)^j 101 (01)^j`, `y = (01)^j 011 (01)^j`, of length `4j + 3`.
pub fn intro_pair(j: usize) -> (BitString, BitString) {
    let pad = BitString::repeat(&"01".parse().expect("literal"), j);
    let mid = |s: &str| pad.concat(&s.parse().expect("literal")).concat(&pad);
    (mid("101"), mid("011"))
}

/// The 1-positions of each string.
pub fn pte_sets(x: &BitString, y: &BitString) -> (Vec<usize>, Vec<usize>) {
    (x.ones(), y.ones())
}

fn power_sums(set: &[usize], upto: usize) -> Vec<BigInt> {
    let mut sums = vec![BigInt::zero(); upto];
    for &a in set {
        let base = BigInt::from(a);
        let mut pow = BigInt::one();
        for s in sums.iter_mut() {
            pow *= &base;
            *s += &pow;
        }
    }
    sums
}

/// Whether `(a, b)` solves the degree-`k` PTE system: equal sizes and equal
/// power sums for every exponent `1..=k`.
pub fn verify_pte(a: &[usize], b: &[usize], k: usize) -> bool {
    a.len() == b.len() && power_sums(a, k) == power_sums(b, k)
}

/// Largest `k` for which `(a, b)` solves the degree-`k` PTE system, found
/// from power sums alone; `-1` when the sizes differ.
///
/// Distinct sets of equal size `s` cannot agree on all power sums through
/// `s`, so for `a ≠ b` the answer is below `s`.
pub fn pte_degree_by_power_sums(a: &[usize], b: &[usize]) -> Result<i64> {
    if a.len() != b.len() {
        return Ok(-1);
    }
    let (mut sa, mut sb) = (a.to_vec(), b.to_vec());
    sa.sort_unstable();
    sb.sort_unstable();
    if sa == sb {
        return Err(Error::IdenticalStrings);
    }
    let s = a.len();
    let (pa, pb) = (power_sums(a, s), power_sums(b, s));
    let agree = pa.iter().zip(&pb).take_while(|(u, v)| u == v).count();
    Ok(agree as i64)
}

/// `multiplicity_at_one(Q_x - Q_y) - 1`.
pub fn pte_degree(x: &BitString, y: &BitString) -> Result<i64> {
    if x == y {
        return Err(Error::IdenticalStrings);
    }
    let f = &IntPolynomial::from_string(x) - &IntPolynomial::from_string(y);
    if f.is_zero() {
        // Unequal lengths padded with zeros can still give equal polynomials.
        return Err(Error::IdenticalStrings);
    }
    let (mult, _) = multiplicity_at_one(&f)?;
    Ok(mult as i64 - 1)
}

/// The seven-part edit-distance-four layout
/// `x = a·a1·b·a2·c·d·e`, `y = a·b·c·b1·d·b2·e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EditFourForm {
    pub a: BitString,
    pub b: BitString,
    pub c: BitString,
    pub d: BitString,
    pub e: BitString,
    pub a1: u8,
    pub a2: u8,
    pub b1: u8,
    pub b2: u8,
}

impl EditFourForm {
    fn bit(v: u8) -> BitString {
        BitString::from_bits(vec![v]).expect("bit")
    }

    pub fn x(&self) -> BitString {
        [
            &self.a,
            &Self::bit(self.a1),
            &self.b,
            &Self::bit(self.a2),
            &self.c,
            &self.d,
            &self.e,
        ]
        .into_iter()
        .fold(BitString::new(), |acc, s| acc.concat(s))
    }

    pub fn y(&self) -> BitString {
        [
            &self.a,
            &self.b,
            &self.c,
            &Self::bit(self.b1),
            &self.d,
            &Self::bit(self.b2),
            &self.e,
        ]
        .into_iter()
        .fold(BitString::new(), |acc, s| acc.concat(s))
    }
}

/// Splits a hard pair into the edit-distance-four layout with `b = d = ε`.
pub fn hard_form_split(spec: &HardPairSpec) -> EditFourForm {
    EditFourForm {
        a: spec.prefix.clone(),
        b: BitString::new(),
        c: spec.e.clone(),
        d: BitString::new(),
        e: BitString::new(),
        a1: 1,
        a2: 0,
        b1: 0,
        b2: 1,
    }
}
