//! The code families and their maximum syndrome weights.

use syncomp::qcode::{
    concatenate, max_syndrome_weight, rotated_surface_code, steane_code, tetrahedral_code, CssCode, Side, WeightMode,
    DEFAULT_QUBIT_CAP,
};

fn show(name: &str, code: &CssCode) -> syncomp::Result<()> {
    let w = max_syndrome_weight(code.hx(), code.d(), WeightMode::Exact)
        .or_else(|_| max_syndrome_weight(code.hx(), code.d(), WeightMode::LdpcBound { c: code.hx().max_col_weight() }))?;
    println!(
        "{name:<12} [[{}, {}, {}]]  {} X checks, {} Z checks, w(Hx) = {w}",
        code.n(),
        code.k(),
        code.d(),
        code.checks(Side::X).rows(),
        code.checks(Side::Z).rows()
    );
    Ok(())
}

fn main() -> syncomp::Result<()> {
    for d in [3, 5, 7] {
        show(&format!("surface d={d}"), &rotated_surface_code(d)?)?;
    }
    show("steane", &steane_code())?;
    show("tetrahedral", &tetrahedral_code())?;
    show("steane^2", &concatenate(&steane_code(), 2, DEFAULT_QUBIT_CAP)?)?;

    println!("\n{}", rotated_surface_code(3)?.to_text());
    Ok(())
}
