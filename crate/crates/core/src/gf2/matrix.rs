use std::fmt;
use std::str::FromStr;

use super::bitvec::{dot_words, words_for, xor_words, BitVec, WORD};
use crate::error::{Error, Result};

/// Dense row-major bit-packed binary matrix.
///
/// Carrier for parity-check matrices, stabilizer generators, compressors
/// and measurement matrices. Padding bits past `cols` are kept at zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from rows given as bit vectors; all rows must share one length.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    op: "from_rows",
                    left: (rows.len(), cols),
                    right: (1, r.len()),
                });
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Build from a dense 0/1 table. Panics on ragged input.
    pub fn from_dense(table: &[Vec<u8>]) -> Self {
        let cols = table.first().map_or(0, Vec::len);
        let mut m = Self::zeros(table.len(), cols);
        for (i, row) in table.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, &b) in row.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(i).to_vec())
    }

    pub fn row_vecs(&self) -> Vec<BitVec> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn column(&self, j: usize) -> BitVec {
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&i| self.get(i, j)))
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn col_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    /// Largest number of rows any single column participates in.
    pub fn max_col_weight(&self) -> usize {
        (0..self.cols)
            .map(|j| self.col_weight(j))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row_into(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src);
        let s = self.stride;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..(dst + 1) * s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..(src + 1) * s])
        };
        xor_words(a, b);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    /// `M v` over GF(2): one bit per row.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if dot_words(self.row_words(i), v.words()) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn matmul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let src = other.row_words(k).to_vec();
                    xor_words(out.row_words_mut(i), &src);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row(i).iter_ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(indices.len(), self.cols);
        for (k, &i) in indices.iter().enumerate() {
            let src = self.row_words(i).to_vec();
            m.row_words_mut(k).copy_from_slice(&src);
        }
        m
    }

    /// Vertical concatenation. All blocks must have the same column count.
    pub fn vstack(cols: usize, blocks: &[&BitMatrix]) -> Result<BitMatrix> {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut m = BitMatrix::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::DimensionMismatch {
                    op: "vstack",
                    left: (rows, cols),
                    right: b.shape(),
                });
            }
            for i in 0..b.rows {
                let src = b.row_words(i).to_vec();
                m.row_words_mut(at).copy_from_slice(&src);
                at += 1;
            }
        }
        Ok(m)
    }

    /// Column `k` of the result is column `perm[k]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.cols);
        let mut m = BitMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (k, &src) in perm.iter().enumerate() {
                if self.get(i, src) {
                    m.set(i, k, true);
                }
            }
        }
        m
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    /// Pivots are taken at the lowest available column index. Zero rows are
    /// kept at the bottom.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && m.get(i, c) {
                    m.xor_row_into(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// GF(2) row rank.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let word = c / WORD;
            let mask = 1u64 << (c % WORD);
            let Some(p) = (r..self.rows).find(|&i| m.data[i * m.stride + word] & mask != 0)
            else {
                continue;
            };
            m.swap_rows(r, p);
            for i in r + 1..self.rows {
                if m.data[i * m.stride + word] & mask != 0 {
                    m.xor_row_into(i, r);
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of `{v : M v = 0}` as rows; `cols - rank` rows.
    pub fn nullspace_basis(&self) -> BitMatrix {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = BitMatrix::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            basis.set(k, f, true);
            for (row, &p) in pivots.iter().enumerate() {
                if r.get(row, f) {
                    basis.set(k, p, true);
                }
            }
        }
        basis
    }

    /// Canonical form `[I | P']` of a full-row-rank matrix together with the
    /// column permutation realising it: column `k` of the result is column
    /// `perm[k]` of the row-reduced input.
    pub fn canonical_form(&self) -> Result<(BitMatrix, Vec<usize>)> {
        let (r, pivots) = self.rref();
        if pivots.len() != self.rows {
            return Err(Error::RankDeficient {
                rank: pivots.len(),
                rows: self.rows,
            });
        }
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut perm = pivots.clone();
        perm.extend((0..self.cols).filter(|&c| !is_pivot[c]));
        Ok((r.permute_columns(&perm), perm))
    }

    /// Indices of a maximal independent subset of rows, chosen greedily in
    /// row order.
    pub fn independent_row_indices(&self) -> Vec<usize> {
        let mut basis: Vec<(usize, BitVec)> = Vec::new();
        let mut keep = Vec::new();
        for i in 0..self.rows {
            let mut v = self.row(i);
            for (p, b) in &basis {
                if v.get(*p) {
                    v.xor_assign(b);
                }
            }
            let lead = v.iter_ones().next();
            if let Some(p) = lead {
                // keep the basis fully reduced on pivot positions
                for (_, b) in basis.iter_mut() {
                    if b.get(p) {
                        b.xor_assign(&v);
                    }
                }
                basis.push((p, v));
                keep.push(i);
            }
        }
        keep
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVec) -> bool {
        let base = self.rank();
        let stacked = BitMatrix::vstack(
            self.cols,
            &[self, &BitMatrix::from_rows(self.cols, std::slice::from_ref(v)).unwrap()],
        )
        .unwrap();
        stacked.rank() == base
    }

    /// Bit-exact text form: `r n` header then `r` lines of `n` characters.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            s.push_str(&self.row(i).to_string());
            s.push('\n');
        }
        s
    }

    /// Parse from an iterator of lines, consuming exactly one matrix block.
    pub fn parse_lines<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<BitMatrix> {
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing matrix header".into()))?;
        let mut it = header.split(' ');
        let (Some(r), Some(c), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!("bad matrix header {header:?}")));
        };
        let rows: usize = r
            .parse()
            .map_err(|_| Error::Parse(format!("bad row count {r:?}")))?;
        let cols: usize = c
            .parse()
            .map_err(|_| Error::Parse(format!("bad column count {c:?}")))?;
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {i}")))?;
            if line.len() != cols {
                return Err(Error::Parse(format!(
                    "row {i} has {} characters, expected {cols}",
                    line.len()
                )));
            }
            for (j, ch) in line.bytes().enumerate() {
                match ch {
                    b'0' => {}
                    b'1' => m.set(i, j, true),
                    _ => return Err(Error::Parse(format!("invalid character in row {i}"))),
                }
            }
        }
        Ok(m)
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let m = BitMatrix::parse_lines(&mut lines)?;
        if lines.any(|l| !l.is_empty()) {
            return Err(Error::Parse("trailing content after matrix".into()));
        }
        Ok(m)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i))?;
        }
        Ok(())
    }
}
