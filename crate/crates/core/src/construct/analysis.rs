use serde::Serialize;

use super::{pte_degree_by_power_sums, pte_sets};
use crate::channel::profile_l1_separation;
use crate::error::{Error, Result};
use crate::polynomial::circle::ratio_to_f64;
use crate::polynomial::{
    circle_supremum_with, mult_to_sup_lower_bound, multiplicity_at_one, sign_changes, CircleParams,
    IntPolynomial, SupremumCertificate, SupremumOptions,
};
use crate::strings::{
    block_decompose, edit_distance, hamming_distance, BitString, BlockDecomposition,
};

#[derive(Clone, Debug, Default)]
pub struct AnalysisOptions {
    pub supremum: SupremumOptions,
    /// Block budget for the decomposition; `None` means `n`, which always
    /// succeeds for equal-weight pairs.
    pub max_blocks: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BlockOutcome {
    Found {
        blocks: usize,
        /// `multiplicity ≤ 3 · blocks`.
        bound_holds: bool,
        decomposition: BlockDecomposition,
    },
    /// Needs more than `max_blocks` blocks.
    TooMany { max_blocks: usize },
    /// Weights differ, so the multiplicity is already 0.
    UnequalWeights,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairAnalysis {
    pub x: BitString,
    pub y: BitString,
    pub n: usize,
    pub p: CircleParams,
    pub hamming: usize,
    pub edit_distance: usize,
    /// `weight(x) - weight(y)`.
    pub weight_difference: i64,
    pub degree: usize,
    pub multiplicity: usize,
    pub sign_changes: usize,
    pub pte_sets: (Vec<usize>, Vec<usize>),
    pub pte_degree: i64,
    pub supremum: SupremumCertificate,
    /// `(1/2) (4 deg^{k+2})^{-k}` with `k` the multiplicity; may underflow.
    pub theory_lower_bound: f64,
    pub theory_lower_bound_log10: f64,
    pub l1_separation: f64,
    pub blocks: BlockOutcome,
}

fn theory_bound_log10(degree: usize, k: usize) -> f64 {
    let (n, k) = (degree.max(1) as f64, k as f64);
    -(2f64.log10()) - k * (4f64.log10() + (k + 2.0) * n.log10())
}

pub fn analyze_pair(x: &BitString, y: &BitString, circle: &CircleParams) -> Result<PairAnalysis> {
    analyze_pair_with(x, y, circle, &AnalysisOptions::default())
}

pub fn analyze_pair_with(
    x: &BitString,
    y: &BitString,
    circle: &CircleParams,
    opts: &AnalysisOptions,
) -> Result<PairAnalysis> {
    let hamming = hamming_distance(x, y)?;
    if hamming == 0 {
        return Err(Error::IdenticalStrings);
    }
    let f = &IntPolynomial::from_string(x) - &IntPolynomial::from_string(y);
    let degree = f.degree().ok_or(Error::IdenticalStrings)?;
    let (multiplicity, _) = multiplicity_at_one(&f)?;
    let changes = sign_changes(&f)?;
    if multiplicity > changes {
        return Err(Error::Invariant(format!(
            "multiplicity {multiplicity} exceeds {changes} sign changes"
        )));
    }

    let (dx, dy) = pte_sets(x, y);
    let pte_degree = multiplicity as i64 - 1;
    let by_sums = pte_degree_by_power_sums(&dx, &dy)?;
    if by_sums != pte_degree {
        return Err(Error::Invariant(format!(
            "PTE degree {pte_degree} from the multiplicity but {by_sums} from power sums"
        )));
    }

    let supremum = circle_supremum_with(&f, circle, &opts.supremum)?;
    let theory = mult_to_sup_lower_bound(degree as u64, multiplicity as u32);

    let weight_difference = x.weight() as i64 - y.weight() as i64;
    let blocks = if weight_difference != 0 {
        BlockOutcome::UnequalWeights
    } else {
        let max_blocks = opts.max_blocks.unwrap_or(x.len());
        match block_decompose(x, y, max_blocks)? {
            Some(decomposition) => BlockOutcome::Found {
                blocks: decomposition.len(),
                bound_holds: multiplicity <= 3 * decomposition.len(),
                decomposition,
            },
            None => BlockOutcome::TooMany { max_blocks },
        }
    };

    Ok(PairAnalysis {
        x: x.clone(),
        y: y.clone(),
        n: x.len(),
        p: circle.clone(),
        hamming,
        edit_distance: edit_distance(x, y),
        weight_difference,
        degree,
        multiplicity,
        sign_changes: changes,
        pte_sets: (dx, dy),
        pte_degree,
        supremum,
        theory_lower_bound: ratio_to_f64(&theory),
        theory_lower_bound_log10: theory_bound_log10(degree, multiplicity),
        l1_separation: profile_l1_separation(x, y, circle)?,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::hard_pair;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn hard_pair_k1() {
        let h = hard_pair(1, &BitString::new()).unwrap();
        let a = analyze_pair(&h.x, &h.y, &CircleParams::half()).unwrap();
        assert_eq!((a.multiplicity, a.pte_degree, a.edit_distance), (3, 2, 4));
        assert!(a.supremum.lower <= a.supremum.upper);
        assert!(a.supremum.lower >= a.theory_lower_bound);
        match a.blocks {
            BlockOutcome::Found {
                blocks,
                bound_holds,
                ..
            } => {
                assert!(blocks >= 3);
                assert!(bound_holds);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn swap_pair() {
        let a = analyze_pair(&bs("10"), &bs("01"), &CircleParams::half()).unwrap();
        assert_eq!((a.multiplicity, a.sign_changes, a.pte_degree), (1, 1, 0));
        match &a.blocks {
            BlockOutcome::Found {
                blocks,
                decomposition,
                ..
            } => {
                assert_eq!(*blocks, 1);
                assert_eq!(decomposition.blocks[0].case.label(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        // Exact: E(10) - E(01) at p = 1/2 is (1/2 - 1/4, -1/4).
        assert!((a.l1_separation - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weight_shortcut() {
        let x = bs("0110100");
        let y = x.flipped(6);
        let a = analyze_pair(&x, &y, &CircleParams::half()).unwrap();
        assert_eq!(a.weight_difference.abs(), 1);
        assert_eq!(a.pte_degree, -1);
        assert_eq!(a.blocks, BlockOutcome::UnequalWeights);
    }

    #[test]
    fn identical_and_unequal_inputs_are_rejected() {
        assert!(matches!(
            analyze_pair(&bs("101"), &bs("101"), &CircleParams::half()),
            Err(Error::IdenticalStrings)
        ));
        assert!(matches!(
            analyze_pair(&bs("101"), &bs("10"), &CircleParams::half()),
            Err(Error::UnequalLengths { .. })
        ));
    }

    #[test]
    fn small_block_budget_reports_too_many() {
        let h = hard_pair(1, &BitString::new()).unwrap();
        let opts = AnalysisOptions {
            max_blocks: Some(2),
            ..AnalysisOptions::default()
        };
        let a = analyze_pair_with(&h.x, &h.y, &CircleParams::half(), &opts).unwrap();
        assert_eq!(a.blocks, BlockOutcome::TooMany { max_blocks: 2 });
    }

    #[test]
    fn log_bound_matches_exact_value() {
        for (n, k) in [(6usize, 3usize), (20, 2), (1, 1), (40, 5)] {
            let exact = ratio_to_f64(&mult_to_sup_lower_bound(n as u64, k as u32));
            assert!((exact.log10() - theory_bound_log10(n, k)).abs() < 1e-9);
        }
    }
}
