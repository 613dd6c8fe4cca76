//! Sharded sampling of logical failure rates with Wilson intervals.

use syncomp::compress::Strategy;
use syncomp::decode::NoiseKind;
use syncomp::qcode::rotated_surface_code;
use syncomp::sim::{estimate_logical_rate, plan_shots, run_trials, DecoderChoice, NoiseModel};

fn main() -> syncomp::Result<()> {
    println!("{:>3} {:>6} {:>8} {:>9}  95% interval", "d", "p", "shots", "rate");
    for d in [3, 5] {
        let code = rotated_surface_code(d)?;
        let schedule = syncomp::compress::build_schedule(&code, Strategy::Identity, d)?;
        for p in [0.005, 0.01, 0.02] {
            let shots = plan_shots(p, 100.0)?;
            let noise = NoiseModel::new(NoiseKind::Phenomenological, p)?;
            let batch = run_trials(&code, &schedule, noise, DecoderChoice::TwoStep, shots, 11)?;
            let e = estimate_logical_rate(&[batch])?;
            println!("{d:>3} {p:>6} {shots:>8} {:>9.5}  [{:.5}, {:.5}]", e.rate, e.low, e.high);
        }
    }
    Ok(())
}
