//! Exhaustive certificates: detectability, tetrahedral sufficiency, two-step decoding.

use syncomp::compress::Strategy;
use syncomp::experiment::{cmd_certify, CertifyRequest, CheckName};
use syncomp::qcode::rotated_surface_code;

fn main() -> syncomp::Result<()> {
    let base = CertifyRequest {
        check: CheckName::Theorem1,
        code: Some(rotated_surface_code(5)?),
        strategies: vec![],
        rounds: 3,
        classical: None,
        rule: None,
        budget: 1 << 32,
    };
    for check in [CheckName::Theorem1, CheckName::Tetrahedral4, CheckName::TwoStep] {
        let strategies = if check == CheckName::TwoStep { vec![Strategy::RowPartitionRepetition] } else { vec![] };
        let report = cmd_certify(&CertifyRequest { check, strategies, ..base.clone() })?;
        println!("{check:?}: {}", if report.passed { "pass" } else { "FAIL" });
        for line in &report.lines {
            println!("  {line}");
        }
    }
    Ok(())
}
