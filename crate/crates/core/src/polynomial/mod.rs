//! Exact integer polynomials and the quantities attached to `Q_x - Q_y`:
//! multiplicity of the root 1, Descartes sign changes, norms, and the
//! certified maximum modulus on a shifted circle (see [`circle`]).

pub mod circle;

use std::fmt;
use std::ops::{Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::strings::BitString;

pub use circle::{
    circle_supremum, circle_supremum_with, CellBound, CircleParams, SupremumCertificate,
    SupremumOptions,
};

/// Polynomial `a_0 + a_1 w + ... + a_n w^n` with arbitrary-precision integer
/// coefficients. Trailing zeros are always stripped, so the zero polynomial
/// has no coefficients and no degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![BigInt::from(c)])
    }

    /// `w^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        Self { coeffs }
    }

    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `Q_x(w) = x_0 + x_1 w + ... + x_{n-1} w^{n-1}`.
    pub fn from_string(x: &BitString) -> Self {
        Self::new(x.bits().iter().map(|&b| BigInt::from(b)).collect())
    }

    /// Coefficients in increasing degree; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `w^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True when every coefficient lies in `{-1, 0, 1}`.
    pub fn is_littlewood(&self) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= BigInt::one())
    }

    /// Multiplication by `w^m`.
    pub fn shift(&self, m: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); m];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Value at `w = 1`, i.e. the coefficient sum.
    pub fn value_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn eval_rational(&self, w: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * w + BigRational::from_integer(c.clone())
            })
    }

    /// Coefficients as binary64; exact for coefficients below 2^53.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Horner evaluation in binary64 complex arithmetic.
    pub fn eval_complex(&self, w: Complex64) -> Complex64 {
        horner(&self.to_f64(), w)
    }

    /// `Σ |a_k|`.
    pub fn l1(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// `Σ k |a_k|`, the derivative mass used by the Lipschitz certificate.
    pub fn weighted_mass(&self) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * BigInt::from(k))
            .sum()
    }

    /// Divides by `(w - 1)` by synthetic division, returning quotient and
    /// remainder `f(1)`.
    pub fn div_by_w_minus_one(&self) -> (IntPolynomial, BigInt) {
        let Some(n) = self.degree() else {
            return (Self::zero(), BigInt::zero());
        };
        // b_{n-1} = a_n, b_{j-1} = a_j + b_j, remainder = a_0 + b_0.
        let mut quotient = vec![BigInt::zero(); n];
        let mut carry = BigInt::zero();
        for j in (1..=n).rev() {
            carry += &self.coeffs[j];
            quotient[j - 1] = carry.clone();
        }
        let remainder = carry + &self.coeffs[0];
        (Self::new(quotient), remainder)
    }
}

pub(crate) fn horner(coeffs: &[f64], w: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("w")?,
                (1, false) => write!(f, "{mag}w")?,
                (_, true) => write!(f, "w^{k}")?,
                (_, false) => write!(f, "{mag}w^{k}")?,
            }
        }
        Ok(())
    }
}

/// JSON form: array of decimal integer strings, index = degree.
impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        let coeffs = raw
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPolynomial::new(coeffs))
    }
}

/// Largest `k` with `(w - 1)^k | f`, together with the integer quotient `g`
/// satisfying `f = (w - 1)^k g` and `g(1) != 0`.
pub fn multiplicity_at_one(f: &IntPolynomial) -> Result<(usize, IntPolynomial)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut k = 0;
    let mut g = f.clone();
    loop {
        let (quotient, remainder) = g.div_by_w_minus_one();
        if !remainder.is_zero() {
            return Ok((k, g));
        }
        g = quotient;
        k += 1;
    }
}

/// Number of sign changes in the coefficient sequence, skipping zeros.
/// Descartes' rule bounds the positive real roots (with multiplicity) by it.
pub fn sign_changes(f: &IntPolynomial) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let signs = f
        .coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.is_positive());
    let mut changes = 0;
    let mut prev: Option<bool> = None;
    for s in signs {
        if prev.is_some_and(|p| p != s) {
            changes += 1;
        }
        prev = Some(s);
    }
    Ok(changes)
}

/// `(Σ |a_j|, (Σ a_j^2)^{1/2})`.
pub fn norms(f: &IntPolynomial) -> (f64, f64) {
    let l1 = f.l1().to_f64().unwrap_or(f64::INFINITY);
    let sq: BigInt = f.coeffs.iter().map(|c| c * c).sum();
    let l2 = sq.to_f64().unwrap_or(f64::INFINITY).sqrt();
    (l1, l2)
}

/// `(1/2) (4 n^{k+2})^{-k}`: the guaranteed maximum modulus on any shifted
/// circle for a degree-`n` Littlewood polynomial whose root at 1 has
/// multiplicity at most `k`.
pub fn mult_to_sup_lower_bound(n: u64, k: u32) -> BigRational {
    let base = BigInt::from(4u32) * BigInt::from(n).pow(k + 2);
    BigRational::new(BigInt::one(), BigInt::from(2u32) * base.pow(k))
}

/// `(n + 1) (e n / k)^k`, bounding `Σ |b_j|` for the quotient
/// `g = f / (w - 1)^k` of a degree-`n` polynomial with coefficients in `[-1, 1]`.
pub fn quotient_mass_bound(n: u64, k: u64) -> f64 {
    let (n, k) = (n as f64, k as f64);
    (n + 1.0) * (std::f64::consts::E * n / k).powf(k)
}

/// Exact `binom(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn from_string_examples() {
        assert_eq!(IntPolynomial::from_string(&bs("101")), poly(&[1, 0, 1]));
        assert!(IntPolynomial::from_string(&bs("0000")).is_zero());
        assert_eq!(IntPolynomial::from_string(&bs("0000")).degree(), None);
        assert_eq!(
            IntPolynomial::from_string(&bs("01110")),
            poly(&[0, 1, 1, 1])
        );
        assert_eq!(poly(&[0, 1, 1, 1]).to_string(), "w + w^2 + w^3");
    }

    #[test]
    fn multiplicity_examples() {
        let (k, g) = multiplicity_at_one(&poly(&[1, 1])).unwrap();
        assert_eq!((k, g), (0, poly(&[1, 1])));
        let (k, g) = multiplicity_at_one(&poly(&[1, -2, 1])).unwrap();
        assert_eq!((k, g), (2, poly(&[1])));
        // (1 - w)(1 - w^3) = (w - 1)^2 (1 + w + w^2)
        let (k, g) = multiplicity_at_one(&poly(&[1, -1, 0, -1, 1])).unwrap();
        assert_eq!(k, 2);
        assert_eq!(g, poly(&[1, 1, 1]));
        assert_eq!(g.value_at_one(), BigInt::from(3));
        assert!(matches!(
            multiplicity_at_one(&IntPolynomial::zero()),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn sign_change_examples() {
        assert_eq!(sign_changes(&poly(&[1, 1, 1])).unwrap(), 0);
        assert_eq!(sign_changes(&poly(&[1, 0, -1])).unwrap(), 1);
        assert_eq!(sign_changes(&poly(&[1, -1, 0, -1, 1])).unwrap(), 2);
        assert!(sign_changes(&IntPolynomial::zero()).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norms(&poly(&[1, 0, 1])), (2.0, 2f64.sqrt()));
        assert_eq!(norms(&IntPolynomial::zero()), (0.0, 0.0));
        assert_eq!(norms(&poly(&[1, -1, 0, -1, 1])), (4.0, 2.0));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(
            mult_to_sup_lower_bound(7, 0),
            BigRational::new(1.into(), 2.into())
        );
        assert_eq!(
            mult_to_sup_lower_bound(4, 1),
            BigRational::new(1.into(), 512.into())
        );
        let d = BigInt::from(2) * BigInt::from(31104).pow(3);
        assert_eq!(mult_to_sup_lower_bound(6, 3), BigRational::new(1.into(), d));
    }

    #[test]
    fn quotient_mass_examples() {
        let e = std::f64::consts::E;
        assert!((quotient_mass_bound(1, 1) - 2.0 * e).abs() < 1e-12);
        assert!((quotient_mass_bound(4, 2) - 20.0 * e * e).abs() < 1e-9);
        let (k, g) = multiplicity_at_one(&poly(&[1, -1, 0, -1, 1])).unwrap();
        assert_eq!(g.l1(), BigInt::from(3));
        assert!(3.0 <= quotient_mass_bound(4, k as u64));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(64, 32).to_string(), "1832624140942590534");
    }

    #[test]
    fn json_round_trip() {
        let f = poly(&[1, -1, 0, -1, 1]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"["1","-1","0","-1","1"]"#);
        assert_eq!(serde_json::from_str::<IntPolynomial>(&s).unwrap(), f);
    }

    fn arb_littlewood(max_deg: usize) -> impl Strategy<Value = IntPolynomial> {
        prop::collection::vec(-1i64..=1, 1..=max_deg + 1)
            .prop_map(|c| IntPolynomial::from_i64s(&c))
            .prop_filter("nonzero", |f| !f.is_zero())
    }

    proptest! {
        #[test]
        fn quotient_reconstructs_and_is_bounded(f in arb_littlewood(30)) {
            let (k, g) = multiplicity_at_one(&f).unwrap();
            let mut back = g.clone();
            let w_minus_one = poly(&[-1, 1]);
            for _ in 0..k {
                back = &back * &w_minus_one;
            }
            prop_assert_eq!(&back, &f);
            prop_assert!(!g.value_at_one().is_zero());
            if k >= 1 {
                let n = f.degree().unwrap() as u64;
                let mass = g.l1().to_f64().unwrap();
                prop_assert!(mass <= quotient_mass_bound(n, k as u64));
            }
        }

        #[test]
        fn descartes_bounds_multiplicity(f in arb_littlewood(30)) {
            let (k, _) = multiplicity_at_one(&f).unwrap();
            prop_assert!(k <= sign_changes(&f).unwrap());
        }

        #[test]
        fn rational_evaluation_at_one_matches_sum(f in arb_littlewood(20)) {
            let v = f.eval_rational(&BigRational::one());
            prop_assert_eq!(v, BigRational::from_integer(f.value_at_one()));
        }
    }
}
