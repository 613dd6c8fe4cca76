//! Shortened BCH and repetition parity checks with brute-force distances.

use syncomp::classical::{bch_parity_check, repetition_parity_check};

fn main() -> syncomp::Result<()> {
    for (length, delta) in [(15, 3), (15, 5), (12, 5), (31, 7)] {
        let code = bch_parity_check(length, delta)?;
        let distance = code
            .min_distance_bruteforce(delta.min(6))
            .map_or_else(|| format!(">= {}", delta.min(6) + 1), |d| d.to_string());
        println!(
            "bch length {length} delta {delta}: {} checks ({}), distance {distance}",
            code.num_checks(),
            code.family().as_str()
        );
    }

    let rep = repetition_parity_check(6)?;
    println!("\nrepetition(6):\n{}", rep.to_text());

    let syndrome = rep.syndrome(&syncomp::gf2::BitVec::from_indices(6, [2]));
    let fix = rep.classical_mwe_decode(&syndrome)?;
    println!("single flip on bit 2 decodes to {:?}", fix.iter_ones().collect::<Vec<_>>());
    Ok(())
}
