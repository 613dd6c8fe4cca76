//! CNOT circuits for product measurements and the circuit-distance probe.

use syncomp::circuits::{circuit_distance_probe, synthesize_schedule, OrderingRule};
use syncomp::compress::{build_schedule, Strategy};
use syncomp::decode::{build_fault_model, NoiseKind};
use syncomp::qcode::rotated_surface_code;

fn main() -> syncomp::Result<()> {
    let code = rotated_surface_code(3)?;
    let schedule = build_schedule(&code, Strategy::Identity, 1)?;
    let circuits = synthesize_schedule(&code, &schedule, OrderingRule::SurfaceZigzag)?;
    println!("{}", circuits.dump());

    for (rule, rounds) in [(OrderingRule::IndexOrder, 1), (OrderingRule::SurfaceZigzag, 3)] {
        let schedule = build_schedule(&code, Strategy::Identity, rounds)?;
        let model = build_fault_model(&code, &schedule, NoiseKind::CircuitDepolarizing, rule)?;
        let probe = circuit_distance_probe(&model, &code, 2, 1 << 30)?;
        match probe.witness {
            Some(w) => println!("{rule:?}, {rounds} round(s): logical fault of weight {} at {w:?}", w.len()),
            None => println!("{rule:?}, {rounds} round(s): no logical fault of weight <= 2"),
        }
    }
    Ok(())
}
