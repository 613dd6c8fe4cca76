//! Crossings, pseudothresholds and slopes from a freshly simulated ledger.

use syncomp::analyze::{shor_repetition_bound, AnalysisReport};
use syncomp::compress::Strategy;
use syncomp::decode::NoiseKind;
use syncomp::experiment::{cmd_analyze, cmd_simulate, AnalysisTask, CodeSpec, ExperimentConfig, ShotsRule};
use syncomp::sim::DecoderChoice;

fn main() -> syncomp::Result<()> {
    let dir = std::env::temp_dir().join("syncomp-threshold-example");
    let config = ExperimentConfig {
        codes: vec![CodeSpec::surface(3), CodeSpec::surface(5)],
        strategy: Strategy::Identity,
        rounds: Some(1),
        noise: NoiseKind::CodeCapacity,
        p_grid: vec![0.02, 0.04, 0.08, 0.12, 0.16, 0.2, 0.25],
        decoder: DecoderChoice::Lookup,
        shots: ShotsRule::Plan { multiplier: 2000.0 },
        seed: 1,
        shards: 4,
        output_dir: "run".into(),
        ordering: None,
        wcap: None,
    };
    cmd_simulate(&config, &dir)?;
    let (report, curves): (AnalysisReport, _) =
        cmd_analyze(&dir.join("run").join("ledger.csv"), AnalysisTask::All, (0.02, 0.08))?;
    println!("{}", report.to_json()?);
    for (label, tsv) in curves {
        println!("\n{label}\n{tsv}");
    }

    println!("repeats for a weight-10 measurement at p = 0.16, 99% confidence: {}", shor_repetition_bound(10, 0.16, 0.99)?);
    Ok(())
}
