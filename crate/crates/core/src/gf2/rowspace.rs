use super::{BitMatrix, BitVec};

/// Reduced echelon basis of a row space, for repeated membership and
/// coset-reduction queries against the same matrix.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    basis: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(m: &BitMatrix) -> Self {
        let (rref, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| rref.row(i)).collect();
        Self {
            cols: m.cols(),
            basis,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Clear every pivot position of `v` by adding basis rows; the result is
    /// a canonical coset representative.
    pub fn reduce(&self, v: &mut BitVec) {
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_rank_test() {
        let m = BitMatrix::from_dense(&[vec![1, 1, 0, 0], vec![0, 1, 1, 0]]);
        let rs = RowSpace::new(&m);
        assert_eq!(rs.dim(), 2);
        for x in 0u8..16 {
            let v = BitVec::from_indices(4, (0..4).filter(|i| x >> i & 1 == 1));
            assert_eq!(rs.contains(&v), m.row_space_contains(&v), "{v}");
        }
    }
}
