use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{binomial, BitMatrix, BitVec};

/// How to obtain the maximum syndrome weight `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WeightMode {
    Exact,
    /// `c (d - 1)` for checks touching each qubit at most `c` times.
    LdpcBound { c: usize },
    /// `(d - 1) c m` for `m` levels of a base code with column weight `c`.
    ConcatBound { c: usize, m: usize },
}

/// Error patterns the exact mode may cover before giving up.
pub const EXACT_WEIGHT_BUDGET: u64 = 100_000_000;

/// Largest `|He|` over errors of weight at most `d - 1`.
pub fn max_syndrome_weight(h: &BitMatrix, d: usize, mode: WeightMode) -> Result<usize> {
    let e = d.saturating_sub(1);
    match mode {
        WeightMode::Exact => max_syndrome_weight_budgeted(h, d, EXACT_WEIGHT_BUDGET),
        WeightMode::LdpcBound { c } => Ok(c * e),
        WeightMode::ConcatBound { c, m } => Ok(e * c * m),
    }
}

/// Exact mode with an explicit budget on the number of error patterns.
pub fn max_syndrome_weight_budgeted(h: &BitMatrix, d: usize, budget: u64) -> Result<usize> {
    let n = h.cols();
    let e = d.saturating_sub(1).min(n);
    let patterns = (0..=e).fold(0u64, |acc, w| acc.saturating_add(binomial(n, w)));
    if patterns > budget {
        return Err(Error::BudgetExceeded {
            what: format!("exact syndrome weight over {patterns} patterns; use a bound mode"),
            budget,
        });
    }
    let cols: Vec<BitVec> = (0..n).map(|j| h.column(j)).collect();
    let mut weights: Vec<usize> = cols.iter().map(BitVec::weight).collect();
    let cmax = weights.iter().copied().max().unwrap_or(0);
    weights.sort_unstable_by(|a, b| b.cmp(a));
    let ceiling = weights.iter().take(e).sum::<usize>().min(h.rows());
    let mut search = Search {
        cols: &cols,
        cmax,
        ceiling,
        best: 0,
        stack: vec![BitVec::zeros(h.rows()); e + 1],
    };
    search.run(0, 0);
    Ok(search.best)
}

struct Search<'a> {
    cols: &'a [BitVec],
    cmax: usize,
    ceiling: usize,
    best: usize,
    stack: Vec<BitVec>,
}

impl Search<'_> {
    fn run(&mut self, start: usize, depth: usize) {
        let w = self.stack[depth].weight();
        self.best = self.best.max(w);
        let left = self.stack.len() - 1 - depth;
        if left == 0 || self.best == self.ceiling || w + left * self.cmax <= self.best {
            return;
        }
        for j in start..self.cols.len() {
            let (lo, hi) = self.stack.split_at_mut(depth + 1);
            hi[0].clone_from(&lo[depth]);
            hi[0].xor_assign(&self.cols[j]);
            self.run(j + 1, depth + 1);
            if self.best == self.ceiling {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::for_each_combination;
    use crate::qcode::{rotated_surface_code, tetrahedral_code};
    use proptest::prelude::*;

    /// Plain enumeration without pruning.
    fn oracle(h: &BitMatrix, d: usize) -> usize {
        let n = h.cols();
        let mut best = 0;
        for w in 0..d.min(n + 1) {
            for_each_combination(n, w, |idx| {
                best = best.max(h.mul_vec(&BitVec::from_indices(n, idx.iter().copied())).weight());
                true
            });
        }
        best
    }

    #[test]
    fn examples() {
        assert_eq!(max_syndrome_weight(&BitMatrix::zeros(3, 5), 3, WeightMode::Exact).unwrap(), 0);
        let s3 = rotated_surface_code(3).unwrap();
        assert_eq!(max_syndrome_weight(s3.hx(), 3, WeightMode::Exact).unwrap(), 4);
        for d in [3, 5, 7, 17] {
            assert_eq!(
                max_syndrome_weight(&BitMatrix::zeros(1, 1), d, WeightMode::LdpcBound { c: 2 }).unwrap(),
                2 * (d - 1)
            );
        }
        assert_eq!(
            max_syndrome_weight(&BitMatrix::zeros(1, 1), 3, WeightMode::ConcatBound { c: 3, m: 2 }).unwrap(),
            12
        );
    }

    #[test]
    fn exact_matches_oracle_and_bound_on_codes() {
        for d in [3, 5] {
            let code = rotated_surface_code(d).unwrap();
            for h in [code.hx(), code.hz()] {
                let exact = max_syndrome_weight(h, d, WeightMode::Exact).unwrap();
                assert_eq!(exact, oracle(h, d));
                assert!(exact <= 2 * (d - 1));
            }
        }
        let t = tetrahedral_code();
        assert_eq!(max_syndrome_weight(t.hx(), 3, WeightMode::Exact).unwrap(), oracle(t.hx(), 3));
        assert_eq!(max_syndrome_weight(t.hz(), 3, WeightMode::Exact).unwrap(), oracle(t.hz(), 3));
    }

    #[test]
    fn budget_is_enforced() {
        let code = rotated_surface_code(9).unwrap();
        assert!(matches!(
            max_syndrome_weight_budgeted(code.hx(), 9, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    proptest! {
        #[test]
        fn pruned_search_equals_enumeration(
            rows in 1usize..7, cols in 1usize..11, d in 1usize..5,
            seed in prop::collection::vec(any::<bool>(), 70)
        ) {
            let dense: Vec<Vec<u8>> = (0..rows)
                .map(|i| (0..cols).map(|j| seed[i * cols + j] as u8).collect())
                .collect();
            let h = BitMatrix::from_dense(&dense);
            let exact = max_syndrome_weight(&h, d, WeightMode::Exact).unwrap();
            prop_assert_eq!(exact, oracle(&h, d));
            let c = h.max_col_weight();
            let bound = max_syndrome_weight(&h, d, WeightMode::LdpcBound { c }).unwrap();
            prop_assert!(exact <= bound);
        }
    }
}
