use serde::{Deserialize, Serialize};

use super::{CodeKind, CssCode, Side};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

/// Corner of a plaquette relative to its center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corner {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl Corner {
    pub const ALL: [Corner; 4] = [
        Corner::TopLeft,
        Corner::TopRight,
        Corner::BottomLeft,
        Corner::BottomRight,
    ];
}

/// Geometry of the rotated surface code on a `d x d` grid of data qubits.
///
/// Data qubit `(r, c)` has index `r*d + c`. Plaquette `(i, j)`, with
/// `0 <= i, j <= d`, touches the data qubits at rows `i-1, i` and columns
/// `j-1, j` that exist. Bulk plaquettes are X type when `i + j` is even and
/// Z type otherwise. Top and bottom boundaries carry weight-2 Z checks,
/// left and right boundaries weight-2 X checks. The logical Z is a column,
/// the logical X a row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceLayout {
    d: usize,
    x_plaquettes: Vec<(usize, usize)>,
    z_plaquettes: Vec<(usize, usize)>,
}

impl SurfaceLayout {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "rotated surface code needs odd d >= 3, got {d}"
            )));
        }
        let mut x_plaquettes = Vec::new();
        let mut z_plaquettes = Vec::new();
        for i in 0..=d {
            for j in 0..=d {
                let row_edge = i == 0 || i == d;
                let col_edge = j == 0 || j == d;
                let even = (i + j) % 2 == 0;
                match (row_edge, col_edge) {
                    (true, true) => {}
                    (true, false) if !even => z_plaquettes.push((i, j)),
                    (false, true) if even => x_plaquettes.push((i, j)),
                    (false, false) if even => x_plaquettes.push((i, j)),
                    (false, false) => z_plaquettes.push((i, j)),
                    _ => {}
                }
            }
        }
        Ok(Self {
            d,
            x_plaquettes,
            z_plaquettes,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Plaquette coordinates in check-row order.
    pub fn plaquettes(&self, side: Side) -> &[(usize, usize)] {
        match side {
            Side::X => &self.x_plaquettes,
            Side::Z => &self.z_plaquettes,
        }
    }

    /// Data qubit at a corner of plaquette `(i, j)`, if it exists.
    pub fn corner(&self, (i, j): (usize, usize), corner: Corner) -> Option<usize> {
        let (r, c) = match corner {
            Corner::TopLeft => (i.checked_sub(1)?, j.checked_sub(1)?),
            Corner::TopRight => (i.checked_sub(1)?, j),
            Corner::BottomLeft => (i, j.checked_sub(1)?),
            Corner::BottomRight => (i, j),
        };
        (r < self.d && c < self.d).then_some(r * self.d + c)
    }

    pub fn support(&self, p: (usize, usize)) -> Vec<usize> {
        Corner::ALL.iter().filter_map(|&k| self.corner(p, k)).collect()
    }

    pub fn checks(&self, side: Side) -> BitMatrix {
        let n = self.d * self.d;
        let rows: Vec<BitVec> = self
            .plaquettes(side)
            .iter()
            .map(|&p| BitVec::from_indices(n, self.support(p)))
            .collect();
        BitMatrix::from_rows(n, &rows).expect("rows have width n")
    }
}

pub fn rotated_surface_code(d: usize) -> Result<CssCode> {
    let layout = SurfaceLayout::new(d)?;
    let n = d * d;
    let logical_z = BitVec::from_indices(n, (0..d).map(|r| r * d));
    let logical_x = BitVec::from_indices(n, 0..d);
    CssCode::with_logicals(
        layout.checks(Side::X),
        layout.checks(Side::Z),
        d,
        CodeKind::Surface { d },
        logical_z,
        logical_x,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::for_each_combination;

    #[test]
    fn distance_three_layout_by_hand() {
        let layout = SurfaceLayout::new(3).unwrap();
        assert_eq!(layout.plaquettes(Side::X), &[(1, 1), (1, 3), (2, 0), (2, 2)]);
        assert_eq!(layout.plaquettes(Side::Z), &[(0, 1), (1, 2), (2, 1), (3, 2)]);
        let code = rotated_surface_code(3).unwrap();
        let hx = BitMatrix::from_dense(&[
            vec![1, 1, 0, 1, 1, 0, 0, 0, 0],
            vec![0, 0, 1, 0, 0, 1, 0, 0, 0],
            vec![0, 0, 0, 1, 0, 0, 1, 0, 0],
            vec![0, 0, 0, 0, 1, 1, 0, 1, 1],
        ]);
        assert_eq!(code.hx(), &hx);
        assert_eq!(code.hx().rank(), 4);
        assert_eq!(code.hz().rank(), 4);
        assert_eq!((code.n(), code.k(), code.d()), (9, 1, 3));
    }

    #[test]
    fn layout_counts_and_weights() {
        for d in [3, 5, 7, 9, 17] {
            let code = rotated_surface_code(d).unwrap();
            let half = (d * d - 1) / 2;
            assert_eq!(code.hx().rows(), half);
            assert_eq!(code.hz().rows(), half);
            assert_eq!(code.hx().rank() + code.hz().rank(), d * d - 1);
            for h in [code.hx(), code.hz()] {
                let weights: Vec<usize> = (0..h.rows()).map(|i| h.row_weight(i)).collect();
                assert!(weights.iter().all(|&w| w == 2 || w == 4));
                assert_eq!(weights.iter().filter(|&&w| w == 2).count(), d - 1);
            }
            assert!(code.hx().matmul(&code.hz().transpose()).unwrap().is_zero());
            assert_eq!(code.logical_z().weight(), d);
        }
        assert!(rotated_surface_code(4).is_err());
        assert!(rotated_surface_code(1).is_err());
    }

    #[test]
    fn no_logical_below_distance() {
        for d in [3, 5] {
            let code = rotated_surface_code(d).unwrap();
            let stab = crate::gf2::RowSpace::new(code.hz());
            for w in 1..d {
                for_each_combination(d * d, w, |idx| {
                    let v = BitVec::from_indices(d * d, idx.iter().copied());
                    if code.hx().mul_vec(&v).is_zero() {
                        assert!(stab.contains(&v), "weight-{w} logical at d={d}");
                    }
                    true
                });
            }
        }
    }
}
