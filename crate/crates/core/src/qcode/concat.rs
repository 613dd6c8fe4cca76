use super::{CodeKind, CssCode};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

pub const DEFAULT_QUBIT_CAP: usize = 2401;

/// Steane `[[7, 1, 3]]`: Hamming checks on both sides.
pub fn steane_code() -> CssCode {
    let h = BitMatrix::from_rows(
        7,
        &(0..3)
            .map(|b| BitVec::from_indices(7, (0..7).filter(|j| (j + 1) >> b & 1 == 1)))
            .collect::<Vec<_>>(),
    )
    .expect("width 7");
    CssCode::new(h.clone(), h, 3, CodeKind::Steane).expect("Steane code is valid")
}

/// Self-concatenation with `levels` levels of `base`.
///
/// Level `m` uses `base` as the outer code over `n_base` blocks of the
/// level `m-1` code; qubit `q` of block `b` has index `b*n_inner + q`.
/// Inner checks repeat on every block; outer checks are the products of
/// inner logical operators over the blocks named by a base check. Checks
/// are tagged with the level that introduced them, innermost 0.
pub fn concatenate(base: &CssCode, levels: usize, qubit_cap: usize) -> Result<CssCode> {
    if levels == 0 {
        return Err(Error::InvalidParameter("concatenation needs levels >= 1".into()));
    }
    if base.k() != 1 {
        return Err(Error::InvalidParameter("concatenation needs k=1".into()));
    }
    let total = (base.n() as u128).checked_pow(levels as u32);
    if total.is_none_or(|t| t > qubit_cap as u128) {
        return Err(Error::BudgetExceeded {
            what: format!("{} levels of a {}-qubit code", levels, base.n()),
            budget: qubit_cap as u64,
        });
    }
    let mut code = base.clone();
    for level in 1..levels {
        code = concat_once(base, &code, level)?;
    }
    if levels > 1 {
        code.kind = CodeKind::Concatenated {
            base: base.kind().name().to_string(),
            levels,
        };
    }
    Ok(code)
}

fn concat_once(outer: &CssCode, inner: &CssCode, level: usize) -> Result<CssCode> {
    let blocks = outer.n();
    let ni = inner.n();
    let n = blocks * ni;
    fn place(v: &BitVec, b: usize, ni: usize) -> impl Iterator<Item = usize> + '_ {
        v.iter_ones().map(move |q| b * ni + q)
    }

    let side = |inner_h: &BitMatrix,
                inner_levels: &[usize],
                outer_h: &BitMatrix,
                lift: &BitVec|
     -> (Vec<BitVec>, Vec<usize>) {
        let mut rows = Vec::new();
        let mut tags = Vec::new();
        for b in 0..blocks {
            for i in 0..inner_h.rows() {
                rows.push(BitVec::from_indices(n, place(&inner_h.row(i), b, ni)));
                tags.push(inner_levels[i]);
            }
        }
        for g in outer_h.row_vecs() {
            rows.push(BitVec::from_indices(n, g.iter_ones().flat_map(|b| place(lift, b, ni))));
            tags.push(level);
        }
        (rows, tags)
    };
    let (xr, xt) = side(inner.hx(), inner.x_levels(), outer.hx(), inner.logical_x());
    let (zr, zt) = side(inner.hz(), inner.z_levels(), outer.hz(), inner.logical_z());
    let lift = |outer_l: &BitVec, inner_l: &BitVec| {
        BitVec::from_indices(n, outer_l.iter_ones().flat_map(|b| place(inner_l, b, ni)))
    };
    let code = CssCode::with_logicals(
        BitMatrix::from_rows(n, &xr)?,
        BitMatrix::from_rows(n, &zr)?,
        outer.d() * inner.d(),
        CodeKind::Custom,
        lift(outer.logical_z(), inner.logical_z()),
        lift(outer.logical_x(), inner.logical_x()),
    )?;
    Ok(code.with_levels(xt, zt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcode::{max_syndrome_weight, WeightMode};

    #[test]
    fn one_level_is_the_base() {
        let s = steane_code();
        assert_eq!(concatenate(&s, 1, DEFAULT_QUBIT_CAP).unwrap(), s);
    }

    #[test]
    fn steane_two_levels() {
        let c = concatenate(&steane_code(), 2, DEFAULT_QUBIT_CAP).unwrap();
        assert_eq!(c.n(), 49);
        assert_eq!(c.d(), 9);
        assert_eq!(c.hx().rank() + c.hz().rank(), 48);
        assert_eq!(c.logical_z().weight(), 9);
        assert_eq!(c.x_levels().iter().filter(|&&l| l == 1).count(), 3);
        assert_eq!(
            c.kind(),
            &CodeKind::Concatenated {
                base: "steane".into(),
                levels: 2
            }
        );
    }

    #[test]
    fn single_error_syndromes_obey_level_bound() {
        let base = steane_code();
        let c = concatenate(&base, 2, DEFAULT_QUBIT_CAP).unwrap();
        let cb = base.hx().max_col_weight();
        let bound = max_syndrome_weight(c.hx(), 2, WeightMode::ConcatBound { c: cb, m: 2 }).unwrap();
        let singles: Vec<usize> = (0..c.n())
            .map(|q| c.hx().mul_vec(&BitVec::from_indices(c.n(), [q])).weight())
            .collect();
        assert!(singles.iter().all(|&w| w <= bound));
        let exact = max_syndrome_weight(c.hx(), 2, WeightMode::Exact).unwrap();
        assert_eq!(exact, *singles.iter().max().unwrap());
    }

    #[test]
    fn three_levels_and_cap() {
        let c = concatenate(&steane_code(), 3, DEFAULT_QUBIT_CAP).unwrap();
        assert_eq!(c.n(), 343);
        assert_eq!(c.hx().rank() + c.hz().rank(), 342);
        assert!(concatenate(&steane_code(), 5, DEFAULT_QUBIT_CAP).is_err());
        assert!(concatenate(&steane_code(), 0, DEFAULT_QUBIT_CAP).is_err());
    }
}
