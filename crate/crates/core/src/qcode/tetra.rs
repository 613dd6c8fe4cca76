use super::{CodeKind, CssCode};
use crate::gf2::{BitMatrix, BitVec};

const N: usize = 15;

/// Qubits are the nonzero vectors of `F_2^4`; qubit `q` is the vector `q + 1`.
/// Cell `i` holds the eight qubits whose coordinate `i` is set.
pub fn tetrahedral_cells() -> Vec<BitVec> {
    (0..4)
        .map(|i| BitVec::from_indices(N, (0..N).filter(|q| (q + 1) >> i & 1 == 1)))
        .collect()
}

/// The 18 weight-4 faces: intersections `C_i & C_j` for `i < j`, then
/// differences `C_i \ C_j` for ordered pairs `i != j`.
pub fn tetrahedral_faces() -> Vec<BitVec> {
    let cell = |q: usize, i: usize| (q + 1) >> i & 1 == 1;
    let mut faces = Vec::with_capacity(18);
    for i in 0..4 {
        for j in i + 1..4 {
            faces.push(BitVec::from_indices(N, (0..N).filter(|&q| cell(q, i) && cell(q, j))));
        }
    }
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                faces.push(BitVec::from_indices(N, (0..N).filter(|&q| cell(q, i) && !cell(q, j))));
            }
        }
    }
    faces
}

/// `[[15, 1, 3]]` tetrahedral code: the four cells as X checks and the
/// first ten independent faces as Z checks.
pub fn tetrahedral_code() -> CssCode {
    let hx = BitMatrix::from_rows(N, &tetrahedral_cells()).expect("width 15");
    let faces = BitMatrix::from_rows(N, &tetrahedral_faces()).expect("width 15");
    let hz = faces.select_rows(&faces.independent_row_indices());
    CssCode::new(hx, hz, 3, CodeKind::Tetrahedral).expect("tetrahedral code is valid")
}
