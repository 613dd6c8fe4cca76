//! Bit-packed GF(2) linear algebra and `GF(2^m)` arithmetic.

mod bitvec;
mod field;
mod matrix;
mod rowspace;

pub use bitvec::BitVec;
pub(crate) use bitvec::xor_words;
pub use field::{primitive_poly, Gf2mField};
pub use matrix::BitMatrix;
pub use rowspace::RowSpace;

/// Lexicographic enumeration of `k`-subsets of `0..n`, yielding each as a
/// sorted index slice. Returns early when `visit` returns `false`.
pub fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `n choose k` saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_lexicographic_and_complete() {
        let mut seen = Vec::new();
        for_each_combination(5, 3, |c| {
            seen.push(c.to_vec());
            true
        });
        assert_eq!(seen.len(), 10);
        assert_eq!(seen.first().unwrap(), &vec![0, 1, 2]);
        assert_eq!(seen.last().unwrap(), &vec![2, 3, 4]);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(sorted, seen);

        let mut empty = 0;
        for_each_combination(4, 0, |c| {
            assert!(c.is_empty());
            empty += 1;
            true
        });
        assert_eq!(empty, 1);

        let mut none = 0;
        for_each_combination(2, 3, |_| {
            none += 1;
            true
        });
        assert_eq!(none, 0);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(25, 4), 12650);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(10, 0), 1);
    }
}
