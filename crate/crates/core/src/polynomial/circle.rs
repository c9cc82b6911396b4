//! The shifted circle `∂B(p; q) = { p + q e^{iθ} : θ ∈ [-π, π] }` and a
//! certified bracket for `sup |f|` over it.
//!
//! Write `g(θ) = f(p + q e^{iθ})`. Along the circle `|g|` is Lipschitz with
//! constant `q |f'(z)| ≤ q Σ k |a_k| |z|^{k-1}`, so evaluating `|g|` at the
//! centre `c` of a cell of half-width `h` bounds it on the whole cell by
//! `|g(c)| + h L`. The second-order bound
//! `|g(c)| + h |g'(c)| + (h^2 / 2) max |g''|`, with
//! `|g''| ≤ q^2 |f''(z)| + q |f'(z)|`, is much tighter for high degree. The
//! search evaluates a uniform grid of cells, then repeatedly splits the cells
//! with the largest bound (branch and bound).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::{horner, IntPolynomial};
use crate::error::{Error, Result};

/// Deletion probability `p` and retention probability `q = 1 - p`.
///
/// Parsed probabilities (`"1/2"`, `"0.25"`) are kept as exact rationals as
/// well, which switches profile and potential computations to exact
/// arithmetic. Values built from an `f64` only carry the float.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleParams {
    p: f64,
    q: f64,
    exact: Option<BigRational>,
}

impl CircleParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidProbability(p.to_string()));
        }
        Ok(Self {
            p,
            q: 1.0 - p,
            exact: None,
        })
    }

    pub fn from_ratio(p: BigRational) -> Result<Self> {
        if p.is_negative() || p >= BigRational::one() {
            return Err(Error::InvalidProbability(p.to_string()));
        }
        let pf = ratio_to_f64(&p);
        let qf = ratio_to_f64(&(BigRational::one() - &p));
        Ok(Self {
            p: pf,
            q: qf,
            exact: Some(p),
        })
    }

    /// `p = num / den`.
    pub fn exact(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidProbability(format!("{num}/{den}")));
        }
        Self::from_ratio(BigRational::new(num.into(), den.into()))
    }

    /// `p = q = 1/2`.
    pub fn half() -> Self {
        Self::exact(1, 2).expect("1/2 is a valid probability")
    }

    /// The unit circle, `p = 0`, `q = 1`.
    pub fn unit() -> Self {
        Self::exact(0, 1).expect("0 is a valid probability")
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn exact_p(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn exact_q(&self) -> Option<BigRational> {
        self.exact.as_ref().map(|p| BigRational::one() - p)
    }

    /// `p + q e^{iθ}`.
    pub fn point(&self, theta: f64) -> Complex64 {
        Complex64::new(self.p + self.q * theta.cos(), self.q * theta.sin())
    }
}

impl FromStr for CircleParams {
    type Err = Error;

    /// Accepts `"a/b"` or a decimal such as `"0.5"`; both are read exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidProbability(s.to_string());
        let ratio = if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            BigRational::new(num, den)
        } else {
            parse_decimal(s).ok_or_else(bad)?
        };
        Self::from_ratio(ratio)
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    Some(BigRational::new(digits, den))
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for CircleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{}", self.p),
        }
    }
}

impl Serialize for CircleParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// How `|g|` is bounded on a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellBound {
    /// Lipschitz constant `q Σ k |a_k|` everywhere.
    Global,
    /// Lipschitz constant `q Σ k |a_k| r^{k-1}` with `r` the largest `|z|`
    /// on the cell; never larger than the global constant since
    /// `|z| ≤ p + q = 1`.
    Local,
    /// The smaller of the local Lipschitz bound and the second-order bound.
    Taylor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupremumOptions {
    pub grid: usize,
    pub refine_rounds: usize,
    /// Cells split per refinement round.
    pub cells_per_round: usize,
    /// Pieces each split cell is cut into.
    pub subdivision: usize,
    pub bound: CellBound,
}

impl Default for SupremumOptions {
    fn default() -> Self {
        Self {
            grid: 1 << 16,
            refine_rounds: 6,
            cells_per_round: 4096,
            subdivision: 8,
            bound: CellBound::Taylor,
        }
    }
}

/// Certified bracket `lower ≤ sup |f| ≤ upper` over the circle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupremumCertificate {
    /// `|f|` at the witness angle.
    pub lower: f64,
    pub upper: f64,
    pub witness_theta: f64,
    pub grid_points: usize,
    pub refine_rounds: usize,
    /// `q Σ k |a_k|`.
    pub lipschitz_bound: f64,
    pub bound_mode: CellBound,
    /// Added to `upper` to cover binary64 rounding in Horner evaluation of
    /// `f`; rounding in `f'` is charged per cell.
    pub rounding_allowance: f64,
}

impl SupremumCertificate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    center: f64,
    half: f64,
    value: f64,
    bound: f64,
}

#[derive(Clone, Copy, Debug)]
struct HeapKey {
    bound: f64,
    index: usize,
}

impl PartialEq for HeapKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    // Largest bound first; lower index wins ties.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.index.cmp(&self.index))
    }
}

fn wrap_angle(theta: f64) -> f64 {
    if theta < -PI {
        theta + 2.0 * PI
    } else if theta > PI {
        theta - 2.0 * PI
    } else {
        theta
    }
}

struct Evaluator<'a> {
    coeffs: Vec<f64>,
    /// `k a_k` at index `k - 1`: the coefficients of `f'`.
    deriv: Vec<f64>,
    /// `k |a_k|` at index `k - 1`, so Horner at `r` gives `Σ k|a_k| r^{k-1}`.
    deriv_mass: Vec<f64>,
    /// `k (k-1) |a_k|` at index `k - 2`.
    curv_mass: Vec<f64>,
    global_lipschitz: f64,
    /// Rounding bound for `|f'|` evaluated by Horner.
    deriv_rounding: f64,
    mode: CellBound,
    circle: &'a CircleParams,
}

fn horner_real(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &m| acc * r + m)
}

impl Evaluator<'_> {
    /// Largest `|z|` over the arc of half-width `half` around `center`.
    fn max_radius(&self, center: f64, half: f64) -> f64 {
        let (p, q) = (self.circle.p, self.circle.q);
        let dist = (wrap_angle(center).abs() - half).max(0.0);
        (p * p + q * q + 2.0 * p * q * dist.cos())
            .max(0.0)
            .sqrt()
            .min(1.0)
    }

    fn cell(&self, center: f64, half: f64) -> Cell {
        let z = self.circle.point(center);
        let value = horner(&self.coeffs, z).norm();
        let q = self.circle.q;
        let bound = match self.mode {
            CellBound::Global => value + half * self.global_lipschitz,
            CellBound::Local | CellBound::Taylor => {
                let r = self.max_radius(center, half);
                let d1_max = q * horner_real(&self.deriv_mass, r);
                let lipschitz = value + half * d1_max.min(self.global_lipschitz);
                if self.mode == CellBound::Local {
                    lipschitz
                } else {
                    let d1 = q * horner(&self.deriv, z).norm() + q * self.deriv_rounding;
                    let d2 = q * q * horner_real(&self.curv_mass, r) + d1_max;
                    lipschitz.min(value + half * d1 + 0.5 * half * half * d2)
                }
            }
        };
        Cell {
            center,
            half,
            value,
            bound,
        }
    }
}

/// [`circle_supremum_with`] using the default options for everything but the
/// grid size and number of refinement rounds.
pub fn circle_supremum(
    f: &IntPolynomial,
    circle: &CircleParams,
    grid: usize,
    refine_rounds: usize,
) -> Result<SupremumCertificate> {
    let opts = SupremumOptions {
        grid,
        refine_rounds,
        ..SupremumOptions::default()
    };
    circle_supremum_with(f, circle, &opts)
}

/// Certified bracket for `sup { |f(p + q e^{iθ})| : θ ∈ [-π, π] }`.
///
/// The coarse grid has cell centres `θ_i = (2i/G - 1) π`, so `θ = 0`
/// (the point `w = 1`) and `θ = -π` are always sampled.
pub fn circle_supremum_with(
    f: &IntPolynomial,
    circle: &CircleParams,
    opts: &SupremumOptions,
) -> Result<SupremumCertificate> {
    if opts.grid < 8 {
        return Err(Error::InvalidGrid(opts.grid));
    }
    let coeffs = f.to_f64();
    let deriv: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect();
    let deriv_mass: Vec<f64> = deriv.iter().map(|c| c.abs()).collect();
    let curv_mass: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(2)
        .map(|(k, c)| (k * (k - 1)) as f64 * c.abs())
        .collect();
    let global_lipschitz = circle.q * f.weighted_mass().to_f64().unwrap_or(f64::INFINITY);
    let degree = f.degree().unwrap_or(0) as f64;
    let l1 = f.l1().to_f64().unwrap_or(f64::INFINITY);
    let rounding_allowance = 4.0 * degree * f64::EPSILON * l1;
    let deriv_rounding = 4.0 * degree * f64::EPSILON * deriv_mass.iter().sum::<f64>();

    let eval = Evaluator {
        coeffs,
        deriv,
        deriv_mass,
        curv_mass,
        global_lipschitz,
        deriv_rounding,
        mode: opts.bound,
        circle,
    };

    let g = opts.grid as f64;
    let half = PI / g;
    let center = |i: usize| (2.0 * i as f64 / g - 1.0) * PI;
    let mut cells: Vec<Cell> = coarse_cells(&eval, opts.grid, center, half);

    let (mut best_value, mut best_theta) = (f64::NEG_INFINITY, 0.0);
    for c in &cells {
        if c.value > best_value {
            best_value = c.value;
            best_theta = c.center;
        }
    }

    let mut heap: BinaryHeap<HeapKey> = cells
        .iter()
        .enumerate()
        .map(|(index, c)| HeapKey {
            bound: c.bound,
            index,
        })
        .collect();

    let pieces = opts.subdivision.max(2);
    for _ in 0..opts.refine_rounds {
        for _ in 0..opts.cells_per_round {
            let Some(top) = heap.pop() else { break };
            let parent = cells[top.index];
            let sub_half = parent.half / pieces as f64;
            for m in 0..pieces {
                let c = parent.center - parent.half + (2 * m + 1) as f64 * sub_half;
                let cell = eval.cell(c, sub_half);
                if cell.value > best_value {
                    best_value = cell.value;
                    best_theta = wrap_angle(c);
                }
                heap.push(HeapKey {
                    bound: cell.bound,
                    index: cells.len(),
                });
                cells.push(cell);
            }
        }
    }

    let top_bound = heap.peek().map_or(best_value, |k| k.bound);
    Ok(SupremumCertificate {
        lower: best_value,
        upper: top_bound.max(best_value) + rounding_allowance,
        witness_theta: best_theta,
        grid_points: opts.grid,
        refine_rounds: opts.refine_rounds,
        lipschitz_bound: global_lipschitz,
        bound_mode: opts.bound,
        rounding_allowance,
    })
}

#[cfg(feature = "parallel")]
fn coarse_cells(
    eval: &Evaluator<'_>,
    grid: usize,
    center: impl Fn(usize) -> f64 + Sync,
    half: f64,
) -> Vec<Cell> {
    use rayon::prelude::*;
    // Each cell is computed independently, so the collected vector is
    // identical to the sequential one.
    (0..grid)
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| eval.cell(center(i), half))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn coarse_cells(
    eval: &Evaluator<'_>,
    grid: usize,
    center: impl Fn(usize) -> f64,
    half: f64,
) -> Vec<Cell> {
    (0..grid).map(|i| eval.cell(center(i), half)).collect()
}
