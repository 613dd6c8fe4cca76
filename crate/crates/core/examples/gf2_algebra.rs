//! Rank, nullspace and canonical form over GF(2), plus GF(16) arithmetic.

use syncomp::gf2::{BitMatrix, Gf2mField};

fn main() -> syncomp::Result<()> {
    let h = BitMatrix::from_dense(&[
        vec![1, 1, 0, 1, 1, 0, 0],
        vec![1, 0, 1, 1, 0, 1, 0],
        vec![0, 1, 1, 1, 0, 0, 1],
    ]);
    println!("Hamming checks, rank {}:\n{}", h.rank(), h.to_text());

    let kernel = h.nullspace_basis();
    println!("codewords span (dimension {}):\n{}", kernel.rows(), kernel.to_text());

    let (canonical, perm) = h.canonical_form()?;
    println!("canonical form [I | P'] under column order {perm:?}:\n{}", canonical.to_text());

    let f = Gf2mField::new(4)?;
    let a = f.power(3);
    let b = f.power(7);
    println!("GF(16) with polynomial {:#b}: a^3 * a^7 = a^{}", f.poly(), f.log(f.mul(a, b)).unwrap());
    Ok(())
}
