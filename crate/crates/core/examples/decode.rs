//! Minimum-weight and two-step decoding of a single noisy history.

use syncomp::circuits::OrderingRule;
use syncomp::compress::{build_schedule, Strategy};
use syncomp::decode::{build_fault_model, mwe_decode, MweConfig, MweDecoder, NoiseKind, TwoStepDecoder};
use syncomp::qcode::rotated_surface_code;

fn main() -> syncomp::Result<()> {
    let code = rotated_surface_code(5)?;
    let schedule = build_schedule(&code, Strategy::RowPartitionRepetition, 3)?;
    let model = build_fault_model(&code, &schedule, NoiseKind::Phenomenological, OrderingRule::IndexOrder)?;
    println!("{} faults, {} outcome bits", model.faults().len(), model.syndrome_len());

    let faults = [3, 40, 41];
    for &i in &faults {
        println!("  fault {i}: {:?}, round {}", model.faults()[i].kind, model.faults()[i].round);
    }
    let (syndrome, logical) = model.effect(&faults);

    let reference = mwe_decode(&model, &syndrome, 3)?;
    let fast = MweDecoder::new(&model, MweConfig::default())?.decode(&syndrome);
    let two_step = TwoStepDecoder::new(&code, &schedule, false, MweConfig::default())?.decode(&syndrome);
    println!("true logical flip {logical}");
    println!("reference  {:?} -> {}", reference.witness, reference.logical_flip);
    println!("table      {:?} -> {}", fast.witness, fast.logical_flip);
    println!("two-step   {:?} -> {}", two_step.status, two_step.logical_flip);
    Ok(())
}
