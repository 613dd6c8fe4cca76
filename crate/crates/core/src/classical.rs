//! Compressor codes: shortened narrow-sense BCH, repetition and identity,
//! with brute-force distance certification and minimum-weight decoding.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{for_each_combination, xor_words, BitMatrix, BitVec, Gf2mField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeFamily {
    Bch,
    Repetition,
    Identity,
}

impl CodeFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            CodeFamily::Bch => "bch",
            CodeFamily::Repetition => "repetition",
            CodeFamily::Identity => "identity",
        }
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bch" => Ok(CodeFamily::Bch),
            "repetition" => Ok(CodeFamily::Repetition),
            "identity" => Ok(CodeFamily::Identity),
            other => Err(Error::Parse(format!("unknown code family {other:?}"))),
        }
    }
}

/// A binary linear code given by an independent set of parity checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCode {
    length: usize,
    checks: BitMatrix,
    designed_distance: usize,
    family: CodeFamily,
}

impl ClassicalCode {
    /// Wrap an explicit check matrix, dropping dependent rows.
    pub fn from_checks(checks: &BitMatrix, designed_distance: usize, family: CodeFamily) -> Self {
        let keep = checks.independent_row_indices();
        Self {
            length: checks.cols(),
            checks: checks.select_rows(&keep),
            designed_distance,
            family,
        }
    }

    /// Full measurement: `L` unit checks, nothing is compressed.
    pub fn identity(length: usize, designed_distance: usize) -> Self {
        Self {
            length,
            checks: BitMatrix::identity(length),
            designed_distance,
            family: CodeFamily::Identity,
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn checks(&self) -> &BitMatrix {
        &self.checks
    }

    pub fn num_checks(&self) -> usize {
        self.checks.rows()
    }

    pub fn designed_distance(&self) -> usize {
        self.designed_distance
    }

    pub fn family(&self) -> CodeFamily {
        self.family
    }

    pub fn syndrome(&self, v: &BitVec) -> BitVec {
        self.checks.mul_vec(v)
    }

    /// Same code with its checks in reduced row echelon form, so that the
    /// pivot columns carry an identity block.
    pub fn canonical(&self) -> ClassicalCode {
        let (rref, pivots) = self.checks.rref();
        let rows: Vec<usize> = (0..pivots.len()).collect();
        Self {
            length: self.length,
            checks: rref.select_rows(&rows),
            designed_distance: self.designed_distance,
            family: self.family,
        }
    }

    /// Smallest weight of a nonzero codeword if it is at most `wmax`,
    /// otherwise `None`.
    pub fn min_distance_bruteforce(&self, wmax: usize) -> Option<usize> {
        let cols: Vec<BitVec> = (0..self.length).map(|j| self.checks.column(j)).collect();
        let stride = cols.first().map_or(0, |c| c.words().len());
        let mut acc = vec![vec![0u64; stride]; wmax + 1];
        (1..=wmax.min(self.length)).find(|&w| zero_sum_exists(&cols, 0, w, &mut acc, 0))
    }

    /// Minimum-weight `v` with `checks * v = s`. Patterns are tried in order of
    /// increasing weight and, within a weight, in lexicographic order of their
    /// sorted support.
    pub fn classical_mwe_decode(&self, s: &BitVec) -> Result<BitVec> {
        if s.len() != self.num_checks() {
            return Err(Error::DimensionMismatch {
                op: "classical_mwe_decode",
                left: self.checks.shape(),
                right: (s.len(), 1),
            });
        }
        let cap = self.decode_cap();
        let cols: Vec<BitVec> = (0..self.length).map(|j| self.checks.column(j)).collect();
        let mut found = None;
        let mut scratch = s.clone();
        for w in 0..=cap {
            for_each_combination(self.length, w, |idx| {
                scratch.clone_from(s);
                for &j in idx {
                    scratch.xor_assign(&cols[j]);
                }
                if scratch.is_zero() {
                    found = Some(BitVec::from_indices(self.length, idx.iter().copied()));
                    false
                } else {
                    true
                }
            });
            if found.is_some() {
                break;
            }
        }
        found.ok_or(Error::DecodeFailure { cap })
    }

    /// Enumeration bound for [`Self::classical_mwe_decode`]: `ceil(L/2) + 1`.
    pub fn decode_cap(&self) -> usize {
        self.length.div_ceil(2) + 1
    }

    /// Rows span the codewords: a basis of the nullspace of the checks.
    pub fn generator_matrix(&self) -> BitMatrix {
        self.checks.nullspace_basis()
    }

    /// Text form: `family delta` header followed by the check matrix.
    pub fn to_text(&self) -> String {
        format!(
            "{} {}\n{}",
            self.family,
            self.designed_distance,
            self.checks.to_text()
        )
    }
}

impl FromStr for ClassicalCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty code file".into()))?;
        let (fam, delta) = header
            .split_once(' ')
            .ok_or_else(|| Error::Parse(format!("bad code header {header:?}")))?;
        let family: CodeFamily = fam.parse()?;
        let designed_distance = delta
            .parse()
            .map_err(|_| Error::Parse(format!("bad designed distance {delta:?}")))?;
        let checks = BitMatrix::parse_lines(&mut lines)?;
        if checks.rank() != checks.rows() {
            return Err(Error::Parse("code checks are not independent".into()));
        }
        Ok(Self {
            length: checks.cols(),
            checks,
            designed_distance,
            family,
        })
    }
}

fn zero_sum_exists(
    cols: &[BitVec],
    start: usize,
    remaining: usize,
    acc: &mut [Vec<u64>],
    depth: usize,
) -> bool {
    if remaining == 0 {
        return acc[depth].iter().all(|&w| w == 0);
    }
    for j in start..=cols.len() - remaining {
        let (lo, hi) = acc.split_at_mut(depth + 1);
        hi[0].copy_from_slice(&lo[depth]);
        xor_words(&mut hi[0], cols[j].words());
        if zero_sum_exists(cols, j + 1, remaining - 1, acc, depth + 1) {
            return true;
        }
    }
    false
}

/// Shortened narrow-sense binary BCH code of length `length` with designed
/// distance at least `delta`.
///
/// Field rows are the odd powers `alpha^(2i+1)`, `i < t = ceil((delta-1)/2)`,
/// evaluated on `alpha^0 .. alpha^(L-1)` over the smallest `GF(2^m)` with
/// `2^m - 1 >= L`; each field row expands into `m` binary rows and dependent
/// rows are dropped. When no compression results (`>= L` independent rows)
/// the identity code is returned instead.
pub fn bch_parity_check(length: usize, delta: usize) -> Result<ClassicalCode> {
    if length < 1 {
        return Err(Error::InvalidParameter("BCH length must be >= 1".into()));
    }
    if delta < 2 {
        return Err(Error::InvalidParameter("BCH designed distance must be >= 2".into()));
    }
    let mut m = 2u32;
    while (1usize << m) - 1 < length {
        m += 1;
    }
    let field = Gf2mField::new(m)?;
    let t = (delta - 1).div_ceil(2);
    let mut rows = Vec::with_capacity(t * m as usize);
    for i in 0..t {
        let e = (2 * i + 1) as i64;
        for bit in 0..m {
            rows.push(BitVec::from_indices(
                length,
                (0..length).filter(|&j| field.power(e * j as i64) >> bit & 1 == 1),
            ));
        }
    }
    let raw = BitMatrix::from_rows(length, &rows)?;
    let code = ClassicalCode::from_checks(&raw, delta, CodeFamily::Bch);
    if code.num_checks() >= length {
        return Ok(ClassicalCode::identity(length, delta));
    }
    Ok(code)
}

/// `[L, 1, L]` repetition code with checks `e_i + e_(i+1)`.
pub fn repetition_parity_check(length: usize) -> Result<ClassicalCode> {
    if length < 2 {
        return Err(Error::InvalidParameter("repetition length must be >= 2".into()));
    }
    let rows: Vec<BitVec> = (0..length - 1)
        .map(|i| BitVec::from_indices(length, [i, i + 1]))
        .collect();
    Ok(ClassicalCode {
        length,
        checks: BitMatrix::from_rows(length, &rows)?,
        designed_distance: length,
        family: CodeFamily::Repetition,
    })
}

/// Precomputed syndrome table equivalent to
/// [`ClassicalCode::classical_mwe_decode`], for codes with few checks.
#[derive(Clone, Debug)]
pub struct ClassicalDecoder {
    code: ClassicalCode,
    table: HashMap<BitVec, BitVec>,
}

impl ClassicalDecoder {
    /// Largest number of distinct syndromes the table will hold.
    pub const TABLE_BUDGET: usize = 1 << 20;

    pub fn new(code: &ClassicalCode) -> Result<Self> {
        let r = code.num_checks();
        if r >= usize::BITS as usize || (1usize << r) > Self::TABLE_BUDGET {
            return Err(Error::BudgetExceeded {
                what: format!("syndrome table for {r} checks"),
                budget: Self::TABLE_BUDGET as u64,
            });
        }
        let target = 1usize << r;
        let cols: Vec<BitVec> = (0..code.length).map(|j| code.checks.column(j)).collect();
        let mut table = HashMap::with_capacity(target);
        let mut s = BitVec::zeros(r);
        for w in 0..=code.decode_cap() {
            for_each_combination(code.length, w, |idx| {
                s.clear();
                for &j in idx {
                    s.xor_assign(&cols[j]);
                }
                table
                    .entry(s.clone())
                    .or_insert_with(|| BitVec::from_indices(code.length, idx.iter().copied()));
                table.len() < target
            });
            if table.len() == target {
                break;
            }
        }
        Ok(Self {
            code: code.clone(),
            table,
        })
    }

    pub fn code(&self) -> &ClassicalCode {
        &self.code
    }

    pub fn decode(&self, s: &BitVec) -> Result<BitVec> {
        self.table.get(s).cloned().ok_or(Error::DecodeFailure {
            cap: self.code.decode_cap(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: enumerate every vector of length `L` and return
    /// the smallest nonzero weight in the nullspace.
    fn distance_by_exhaustion(code: &ClassicalCode) -> usize {
        let l = code.length();
        assert!(l <= 20);
        let cols: Vec<u64> = (0..l)
            .map(|j| {
                (0..code.num_checks())
                    .filter(|&i| code.checks().get(i, j))
                    .fold(0u64, |acc, i| acc | 1 << i)
            })
            .collect();
        (1u32..1 << l)
            .filter(|v| {
                (0..l)
                    .filter(|j| v >> j & 1 == 1)
                    .fold(0u64, |acc, j| acc ^ cols[j])
                    == 0
            })
            .map(|v| v.count_ones() as usize)
            .min()
            .unwrap_or(usize::MAX)
    }

    #[test]
    fn bch_15_3_is_hamming() {
        let c = bch_parity_check(15, 3).unwrap();
        assert_eq!(c.family(), CodeFamily::Bch);
        assert_eq!(c.num_checks(), 4);
        assert_eq!(distance_by_exhaustion(&c), 3);
        assert_eq!(c.min_distance_bruteforce(6), Some(3));
    }

    #[test]
    fn bch_15_5_has_distance_5() {
        let c = bch_parity_check(15, 5).unwrap();
        assert_eq!(c.num_checks(), 8);
        assert_eq!(distance_by_exhaustion(&c), 5);
        assert_eq!(c.min_distance_bruteforce(15), Some(5));
    }

    #[test]
    fn bch_falls_back_to_identity() {
        let c = bch_parity_check(4, 5).unwrap();
        assert_eq!(c.family(), CodeFamily::Identity);
        assert_eq!(c.num_checks(), 4);
        assert_eq!(c.checks(), &BitMatrix::identity(4));
        assert_eq!(c.min_distance_bruteforce(3), None);
    }

    #[test]
    fn bch_rejects_bad_parameters() {
        assert!(bch_parity_check(0, 3).is_err());
        assert!(bch_parity_check(10, 1).is_err());
    }

    #[test]
    fn repetition_examples() {
        let r2 = repetition_parity_check(2).unwrap();
        assert_eq!(r2.checks().to_text(), "1 2\n11\n");
        let r3 = repetition_parity_check(3).unwrap();
        assert_eq!(r3.checks().to_text(), "2 3\n110\n011\n");
        assert_eq!(r3.min_distance_bruteforce(3), Some(3));
        let r6 = repetition_parity_check(6).unwrap();
        assert_eq!(r6.num_checks(), 5);
        assert_eq!(distance_by_exhaustion(&r6), 6);
        assert_eq!(r6.min_distance_bruteforce(6), Some(6));
        assert_eq!(repetition_parity_check(5).unwrap().min_distance_bruteforce(6), Some(5));
        assert!(repetition_parity_check(1).is_err());
    }

    #[test]
    fn bch_designed_distance_holds_on_small_lengths() {
        for l in [5, 7, 9, 12, 15, 16, 20] {
            for delta in [3, 4, 5, 6, 7] {
                let c = bch_parity_check(l, delta).unwrap();
                if c.family() == CodeFamily::Identity {
                    continue;
                }
                assert!(distance_by_exhaustion(&c) >= delta, "L={l} delta={delta}");
            }
        }
    }

    #[test]
    fn bch_designed_distance_up_to_31() {
        for l in [21, 25, 31] {
            for delta in 3..=7 {
                let c = bch_parity_check(l, delta).unwrap();
                assert_eq!(c.min_distance_bruteforce(delta - 1), None, "L={l} delta={delta}");
            }
        }
    }

    #[test]
    fn shortening_never_lowers_distance() {
        let full = bch_parity_check(15, 5).unwrap();
        let full_d = full.min_distance_bruteforce(8).unwrap();
        for l in [9, 11, 13] {
            let short = bch_parity_check(l, 5).unwrap();
            if short.family() == CodeFamily::Bch {
                assert!(short.min_distance_bruteforce(8).unwrap_or(usize::MAX) >= full_d);
            }
        }
    }

    #[test]
    fn decode_examples() {
        let r3 = repetition_parity_check(3).unwrap();
        assert!(r3.classical_mwe_decode(&BitVec::zeros(2)).unwrap().is_zero());
        assert_eq!(
            r3.classical_mwe_decode(&BitVec::from_bits(&[1, 0])).unwrap().to_string(),
            "100"
        );
        let bch = bch_parity_check(15, 5).unwrap();
        let e = BitVec::from_indices(15, [7]);
        assert_eq!(bch.classical_mwe_decode(&bch.syndrome(&e)).unwrap(), e);
        assert!(bch.classical_mwe_decode(&BitVec::zeros(3)).is_err());
    }

    #[test]
    fn decode_within_radius_is_exact() {
        let bch = bch_parity_check(15, 5).unwrap();
        let table = ClassicalDecoder::new(&bch).unwrap();
        for w in 0..=2 {
            for_each_combination(15, w, |idx| {
                let v = BitVec::from_indices(15, idx.iter().copied());
                let s = bch.syndrome(&v);
                assert_eq!(bch.classical_mwe_decode(&s).unwrap(), v);
                assert_eq!(table.decode(&s).unwrap(), v);
                true
            });
        }
    }

    #[test]
    fn table_matches_enumeration_everywhere() {
        let code = repetition_parity_check(7).unwrap().canonical();
        let table = ClassicalDecoder::new(&code).unwrap();
        for s in 0u32..1 << code.num_checks() {
            let s = BitVec::from_indices(6, (0..6).filter(|i| s >> i & 1 == 1));
            assert_eq!(table.decode(&s).unwrap(), code.classical_mwe_decode(&s).unwrap());
        }
    }

    #[test]
    fn canonical_keeps_the_code() {
        let c = bch_parity_check(13, 5).unwrap();
        let k = c.canonical();
        assert_eq!(k.checks().rank(), c.num_checks());
        let stacked = BitMatrix::vstack(13, &[c.checks(), k.checks()]).unwrap();
        assert_eq!(stacked.rank(), c.num_checks());
    }

    #[test]
    fn generator_is_orthogonal_to_checks() {
        let c = bch_parity_check(25, 3).unwrap();
        let g = c.generator_matrix();
        assert_eq!(g.rows(), 20);
        assert!(c.checks().matmul(&g.transpose()).unwrap().is_zero());
    }

    #[test]
    fn text_round_trip() {
        let c = bch_parity_check(15, 5).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("bch 5\n8 15\n"));
        let back: ClassicalCode = text.parse().unwrap();
        assert_eq!(back, c);
        assert!("nope 3\n1 2\n11\n".parse::<ClassicalCode>().is_err());
    }
}
