//! Compressed schedules for the surface code and the large-distance accounting.

use syncomp::compress::{build_schedule, Strategy};
use syncomp::experiment::stats_table;
use syncomp::qcode::rotated_surface_code;

fn main() -> syncomp::Result<()> {
    let code = rotated_surface_code(5)?;
    for strategy in [Strategy::Identity, Strategy::FullBch, Strategy::RowPartitionRepetition] {
        let schedule = build_schedule(&code, strategy, 5)?;
        println!("{}", stats_table(&syncomp::compress::schedule_stats(&schedule), strategy));
    }

    let d17 = build_schedule(&rotated_surface_code(17)?, Strategy::FullBch, 17)?;
    println!("{}", stats_table(&syncomp::compress::schedule_stats(&d17), Strategy::FullBch));
    Ok(())
}
