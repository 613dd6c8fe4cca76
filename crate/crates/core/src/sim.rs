//! Seeded Z-frame Monte Carlo over fault models.
//!
//! Every shot owns a ChaCha8 stream keyed by the master seed and the shot's
//! global index, so pooled counts do not depend on how shots are sharded.

use std::collections::HashMap;
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::OrderingRule;
use crate::compress::MeasurementSchedule;
use crate::decode::{build_fault_model, DecodeVerdict, FaultModel, MweConfig, MweDecoder, NoiseKind, SiteClass, TwoStepDecoder};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::qcode::CssCode;

/// Identifier of the shot generator, recorded with every output.
pub const PRNG_ALGORITHM: &str = "chacha8-stream-per-shot";

/// Probability that a data site flips the Z frame at depolarizing strength `p`.
pub fn data_flip_probability(p: f64) -> f64 {
    2.0 * p / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
        }
        Ok(Self { kind, p })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderChoice {
    /// Generator-level decoder on uncompressed schedules.
    Lookup,
    /// Minimum-weight decoder over the full fault model.
    Mwe,
    TwoStep,
}

impl DecoderChoice {
    pub const ALL: [DecoderChoice; 3] = [DecoderChoice::Lookup, DecoderChoice::Mwe, DecoderChoice::TwoStep];

    pub fn as_str(self) -> &'static str {
        match self {
            DecoderChoice::Lookup => "lookup",
            DecoderChoice::Mwe => "mwe",
            DecoderChoice::TwoStep => "two_step",
        }
    }
}

impl fmt::Display for DecoderChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DecoderChoice::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown decoder {s:?}")))
    }
}

/// One ledger row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub code: String,
    pub d: usize,
    pub strategy: String,
    pub rounds: usize,
    pub noise: NoiseKind,
    pub p: f64,
    pub decoder: DecoderChoice,
    pub shots: u64,
    pub failures: u64,
    pub decode_failures: u64,
    pub seed: u64,
    pub shard: usize,
}

pub const LEDGER_HEADER: &str = "code,d,strategy,rounds,noise,p,decoder,shots,failures,decode_failures,seed,shard";

enum Decoder {
    TwoStep(TwoStepDecoder),
    Mwe(MweDecoder),
}

impl Decoder {
    fn decode(&self, s: &BitVec) -> DecodeVerdict {
        match self {
            Decoder::TwoStep(d) => d.decode(s),
            Decoder::Mwe(d) => d.decode(s),
        }
    }
}

/// A fault model with its decoder, reusable across error rates and seeds.
pub struct Simulator {
    code_name: String,
    d: usize,
    strategy: String,
    rounds: usize,
    choice: DecoderChoice,
    model: FaultModel,
    decoder: Decoder,
}

/// Shots above which a shard stops memoizing decodes.
const CACHE_CAP: usize = 1 << 16;

impl Simulator {
    pub fn new(
        code: &CssCode,
        schedule: &MeasurementSchedule,
        kind: NoiseKind,
        choice: DecoderChoice,
        rule: OrderingRule,
        config: MweConfig,
    ) -> Result<Self> {
        let model = build_fault_model(code, schedule, kind, rule)?;
        let single = kind == NoiseKind::CodeCapacity;
        let decoder = match choice {
            DecoderChoice::Mwe => Decoder::Mwe(MweDecoder::new(&model, config)?),
            DecoderChoice::TwoStep => Decoder::TwoStep(TwoStepDecoder::new(code, schedule, single, config)?),
            DecoderChoice::Lookup => {
                let t = TwoStepDecoder::new(code, schedule, single, config)?;
                if !t.is_uncompressed() {
                    return Err(Error::StrategyInapplicable(
                        "the lookup decoder needs generator outcomes; use two_step or mwe".into(),
                    ));
                }
                Decoder::TwoStep(t)
            }
        };
        Ok(Self {
            code_name: code.kind().name().to_string(),
            d: code.d(),
            strategy: schedule.strategy().to_string(),
            rounds: model.rounds(),
            choice,
            model,
            decoder,
        })
    }

    pub fn model(&self) -> &FaultModel {
        &self.model
    }

    /// Draw the faults of shot `index` and return them as sorted indices.
    pub fn sample(&self, p: f64, seed: u64, index: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let q_data = data_flip_probability(p);
        let q_pair = 4.0 * p / 15.0;
        let mut fired = Vec::new();
        for site in self.model.sites() {
            let u: f64 = rng.gen();
            match site.class {
                SiteClass::Data if u < q_data => fired.push(site.faults.start),
                SiteClass::Measurement if u < p => fired.push(site.faults.start),
                SiteClass::Coupling if u < 3.0 * q_pair => {
                    let alt = ((u / q_pair) as usize).min(2);
                    fired.push(site.faults.start + alt);
                }
                _ => {}
            }
        }
        fired
    }

    /// Shots `[start, end)` of the run keyed by `seed`, labelled as `shard`.
    pub fn run_range(&self, p: f64, seed: u64, start: u64, end: u64, shard: usize) -> Result<TrialBatch> {
        let noise = NoiseModel::new(self.model.kind(), p)?;
        let mut failures = 0;
        let mut decode_failures = 0;
        let mut cache: HashMap<BitVec, Option<bool>> = HashMap::new();
        for index in start..end {
            let fired = self.sample(noise.p, seed, index);
            let (syndrome, truth) = self.model.effect(&fired);
            let guess = match cache.get(&syndrome) {
                Some(&g) => g,
                None => {
                    let v = self.decoder.decode(&syndrome);
                    let g = v.is_ok().then_some(v.logical_flip);
                    if cache.len() < CACHE_CAP {
                        cache.insert(syndrome, g);
                    }
                    g
                }
            };
            match guess {
                Some(g) if g == truth => {}
                Some(_) => failures += 1,
                None => {
                    failures += 1;
                    decode_failures += 1;
                }
            }
        }
        Ok(TrialBatch {
            code: self.code_name.clone(),
            d: self.d,
            strategy: self.strategy.clone(),
            rounds: self.rounds,
            noise: noise.kind,
            p,
            decoder: self.choice,
            shots: end - start,
            failures,
            decode_failures,
            seed,
            shard,
        })
    }

    /// `shots` split into `shards` contiguous ranges, run concurrently and
    /// returned in shard order.
    pub fn run(&self, p: f64, shots: u64, seed: u64, shards: usize) -> Result<Vec<TrialBatch>> {
        if shots == 0 || shards == 0 {
            return Err(Error::InvalidParameter("shots and shards must be >= 1".into()));
        }
        let k = shards as u64;
        (0..shards)
            .into_par_iter()
            .map(|s| {
                let start = shots * s as u64 / k;
                let end = shots * (s as u64 + 1) / k;
                self.run_range(p, seed, start, end, s)
            })
            .collect()
    }
}

/// Single-shard convenience wrapper around [`Simulator`].
pub fn run_trials(
    code: &CssCode,
    schedule: &MeasurementSchedule,
    noise: NoiseModel,
    decoder: DecoderChoice,
    shots: u64,
    seed: u64,
) -> Result<TrialBatch> {
    let sim = Simulator::new(code, schedule, noise.kind, decoder, OrderingRule::default_for(code), MweConfig::default())?;
    let mut v = sim.run(noise.p, shots, seed, 1)?;
    Ok(v.remove(0))
}

/// Pooled failure fraction with a 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub shots: u64,
    pub failures: u64,
    pub rate: f64,
    pub low: f64,
    pub high: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

pub fn wilson_interval(failures: u64, shots: u64) -> Result<RateEstimate> {
    if shots == 0 {
        return Err(Error::InvalidParameter("no shots to pool".into()));
    }
    if failures > shots {
        return Err(Error::InvalidParameter(format!("{failures} failures in {shots} shots")));
    }
    let n = shots as f64;
    let rate = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (rate + z2 / (2.0 * n)) / denom;
    let half = Z95 * (rate * (1.0 - rate) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(RateEstimate {
        shots,
        failures,
        rate,
        low: if failures == 0 { 0.0 } else { (center - half).max(0.0) },
        high: if failures == shots { 1.0 } else { (center + half).min(1.0) },
    })
}

pub fn estimate_logical_rate(batches: &[TrialBatch]) -> Result<RateEstimate> {
    let shots = batches.iter().map(|b| b.shots).sum();
    let failures = batches.iter().map(|b| b.failures).sum();
    wilson_interval(failures, shots)
}

/// `ceil(multiplier / p)`.
pub fn plan_shots(p: f64, multiplier: f64) -> Result<u64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("plan_shots needs 0 < p <= 1, got {p}")));
    }
    if multiplier.is_nan() || multiplier <= 0.0 {
        return Err(Error::InvalidParameter("multiplier must be positive".into()));
    }
    let x = multiplier / p;
    // Absorb representation error so 10 / 0.01 gives 1000.
    Ok((x - x * 1e-12).ceil() as u64)
}

/// Append rows to a CSV ledger, writing the header if the file is new or empty.
pub fn append_ledger(path: &Path, batches: &[TrialBatch]) -> Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if file.metadata()?.len() == 0 {
        writeln!(file, "{LEDGER_HEADER}")?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    for b in batches {
        w.serialize(b)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ledger(path: &Path) -> Result<Vec<TrialBatch>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != LEDGER_HEADER {
        return Err(Error::Parse(format!("ledger header {:?}", header.join(","))));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
