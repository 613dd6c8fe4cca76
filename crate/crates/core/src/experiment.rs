//! Experiment configs and the operations behind each CLI subcommand.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analyze::{curves_from_ledger, AnalysisReport};
use crate::circuits::{circuit_distance_probe, OrderingRule};
use crate::classical::{bch_parity_check, repetition_parity_check, ClassicalCode};
use crate::compress::{
    build_schedule, schedule_stats, tetrahedral_sufficient_z, theorem1_certificate, MeasurementSchedule,
    ScheduleStats, Strategy,
};
use crate::decode::{build_fault_model, default_wcap, two_step_certificate, weak_ft_certificate, MweConfig, NoiseKind};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, RowSpace};
use crate::qcode::{
    concatenate, rotated_surface_code, steane_code, tetrahedral_code, CodeKind, CssCode, Side, DEFAULT_QUBIT_CAP,
};
use crate::sim::{append_ledger, plan_shots, read_ledger, DecoderChoice, Simulator, TrialBatch, PRNG_ALGORITHM};

/// Which code to build.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    /// `surface`, `tetrahedral`, `steane` or `concat`.
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Base family for `concat`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
}

impl CodeSpec {
    pub fn surface(d: usize) -> Self {
        Self {
            family: "surface".into(),
            d: Some(d),
            base: None,
            levels: None,
        }
    }

    pub fn build(&self) -> Result<CssCode> {
        let need_d = || {
            self.d
                .ok_or_else(|| Error::InvalidParameter(format!("{} needs d", self.family)))
        };
        match self.family.as_str() {
            "surface" => rotated_surface_code(need_d()?),
            "tetrahedral" => Ok(tetrahedral_code()),
            "steane" => Ok(steane_code()),
            "concat" => {
                let base = CodeSpec {
                    family: self.base.clone().unwrap_or_else(|| "steane".into()),
                    d: self.d,
                    base: None,
                    levels: None,
                };
                if base.family == "concat" {
                    return Err(Error::InvalidParameter("concat base must be a plain code".into()));
                }
                concatenate(&base.build()?, self.levels.unwrap_or(2), DEFAULT_QUBIT_CAP)
            }
            other => Err(Error::InvalidParameter(format!("unknown code family {other:?}"))),
        }
    }

    fn from_kind(kind: &CodeKind) -> Option<Self> {
        let plain = |family: &str| CodeSpec {
            family: family.into(),
            d: None,
            base: None,
            levels: None,
        };
        match kind {
            CodeKind::Surface { d } => Some(CodeSpec::surface(*d)),
            CodeKind::Tetrahedral => Some(plain("tetrahedral")),
            CodeKind::Steane => Some(plain("steane")),
            CodeKind::Concatenated { base, levels } => Some(CodeSpec {
                base: Some(base.clone()),
                levels: Some(*levels),
                ..plain("concat")
            }),
            CodeKind::Custom => None,
        }
    }
}

const KIND_PREFIX: &str = "# kind ";

/// Code file text: `n k d`, the `Hx` and `Hz` blocks, and a trailing
/// comment recording how the code was built.
pub fn code_file_text(code: &CssCode) -> Result<String> {
    let mut out = code.to_text();
    if !matches!(code.kind(), CodeKind::Custom) {
        let _ = writeln!(out, "{KIND_PREFIX}{}", serde_json::to_string(code.kind())?);
    }
    Ok(out)
}

/// Parse a code file. A recorded kind is rebuilt and must reproduce the
/// stored checks exactly.
pub fn load_code(text: &str) -> Result<CssCode> {
    let mut kind = None;
    let mut body = String::new();
    for line in text.lines() {
        if let Some(k) = line.strip_prefix(KIND_PREFIX) {
            kind = Some(serde_json::from_str::<CodeKind>(k)?);
        } else if !line.starts_with('#') {
            body.push_str(line);
            body.push('\n');
        }
    }
    let parsed: CssCode = body.parse()?;
    match kind.as_ref().and_then(CodeSpec::from_kind) {
        Some(spec) => {
            let built = spec.build()?;
            if built.hx() != parsed.hx() || built.hz() != parsed.hz() || built.d() != parsed.d() {
                return Err(Error::Parse(format!("checks differ from the recorded {} code", spec.family)));
            }
            Ok(built)
        }
        None => Ok(parsed),
    }
}

pub fn cmd_build(spec: &CodeSpec) -> Result<String> {
    code_file_text(&spec.build()?)
}

pub fn cmd_compress(code: &CssCode, strategy: Strategy, rounds: usize) -> Result<(MeasurementSchedule, ScheduleStats, String)> {
    let schedule = build_schedule(code, strategy, rounds)?;
    let stats = schedule_stats(&schedule);
    let table = stats_table(&stats, strategy);
    Ok((schedule, stats, table))
}

/// Human-readable accounting, one `key value` pair per line.
pub fn stats_table(s: &ScheduleStats, strategy: Strategy) -> String {
    let mut out = String::new();
    let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
    let _ = writeln!(out, "strategy\t{strategy}");
    let _ = writeln!(out, "rounds\t{}", s.rounds);
    let _ = writeln!(out, "generators\t{}", s.generators);
    let _ = writeln!(out, "per_round_x\t{}", s.per_round_x);
    let _ = writeln!(out, "per_round_z\t{}", s.per_round_z);
    let _ = writeln!(out, "per_round\t{}", s.per_round);
    let _ = writeln!(out, "total\t{}", s.total);
    let _ = writeln!(out, "max_weight_x\t{}", s.max_weight_x);
    let _ = writeln!(out, "max_weight_z\t{}", s.max_weight_z);
    let _ = writeln!(out, "mean_weight_x\t{:.3}", s.mean_weight_x);
    let _ = writeln!(out, "mean_weight_z\t{:.3}", s.mean_weight_z);
    let _ = writeln!(out, "fallback_subsets\t{}", s.fallback_subsets);
    let _ = writeln!(out, "formula_generators\t{}", opt(s.formula_generators));
    let _ = writeln!(out, "formula_per_round\t{}", opt(s.formula_per_round));
    let _ = writeln!(out, "formula_total\t{}", opt(s.formula_total));
    if let (Some(g), Some(f)) = (s.formula_generators, s.formula_per_round) {
        let _ = writeln!(out, "formula_saving\t{}", g as i64 - f as i64);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Theorem1,
    TwoStep,
    Tetrahedral4,
    ClassicalDistance,
    CircuitDistance,
}

impl std::str::FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Parse(format!("unknown check {s:?}")))
    }
}

/// Inputs a certificate may use; unused fields are ignored.
#[derive(Clone, Debug)]
pub struct CertifyRequest {
    pub check: CheckName,
    pub code: Option<CssCode>,
    /// Strategies for `theorem1`; empty means every applicable one.
    pub strategies: Vec<Strategy>,
    pub rounds: usize,
    /// Classical code for `classical_distance`.
    pub classical: Option<ClassicalCode>,
    pub rule: Option<OrderingRule>,
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub check: CheckName,
    pub passed: bool,
    pub lines: Vec<String>,
    pub witness: Option<String>,
}

fn bits(v: &BitVec) -> String {
    v.to_bits().iter().map(|b| char::from(b'0' + b)).collect()
}

fn need_code(r: &CertifyRequest) -> Result<&CssCode> {
    r.code
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("this check needs a code".into()))
}

pub fn cmd_certify(r: &CertifyRequest) -> Result<CertifyReport> {
    let mut lines = Vec::new();
    let mut witness = None;
    match r.check {
        CheckName::Theorem1 => {
            let code = need_code(r)?;
            let strategies = if r.strategies.is_empty() { Strategy::ALL.to_vec() } else { r.strategies.clone() };
            for s in strategies {
                let schedule = match build_schedule(code, s, 1) {
                    Ok(x) => x,
                    Err(Error::StrategyInapplicable(why)) if r.strategies.is_empty() => {
                        lines.push(format!("{s}: skipped ({why})"));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let rep = theorem1_certificate(code, &schedule, &[Side::X, Side::Z], r.budget)?;
                lines.push(format!("{s}: {} patterns, {}", rep.patterns, if rep.passed() { "pass" } else { "FAIL" }));
                if let Some((side, e)) = rep.witness {
                    witness = Some(format!("{s} {side} {}", bits(&e)));
                    break;
                }
            }
        }
        CheckName::TwoStep => {
            let code = need_code(r)?;
            let strategies = if r.strategies.is_empty() { Strategy::ALL.to_vec() } else { r.strategies.clone() };
            for s in strategies {
                let schedule = match build_schedule(code, s, r.rounds) {
                    Ok(x) => x,
                    Err(Error::StrategyInapplicable(why)) if r.strategies.is_empty() => {
                        lines.push(format!("{s}: skipped ({why})"));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let rep = two_step_certificate(code, &schedule, r.budget)?;
                lines.push(format!(
                    "{s}: w={} t={} cases={} excess={} {}",
                    rep.w.map_or_else(|| "-".into(), |w| w.to_string()),
                    rep.t,
                    rep.cases,
                    rep.excess,
                    if rep.passed() { "pass" } else { "FAIL" }
                ));
                if let Some(c) = rep.witness {
                    witness = Some(format!("{s} faults {:?}", c.faults));
                    break;
                }
            }
        }
        CheckName::Tetrahedral4 => {
            let code = tetrahedral_code();
            let m = tetrahedral_sufficient_z();
            let stab = RowSpace::new(code.hz());
            let weights: Vec<usize> = (0..m.rows()).map(|i| m.row_weight(i)).collect();
            let in_group = m.row_vecs().iter().all(|r| stab.contains(r));
            let syndromes: Vec<BitVec> = (0..code.n()).map(|q| m.column(q)).collect();
            let distinct = (0..code.n())
                .filter(|&q| !syndromes[q].is_zero() && syndromes.iter().filter(|s| **s == syndromes[q]).count() == 1)
                .count();
            lines.push(format!("operators {} weights {weights:?} stabilizers {in_group}", m.rows()));
            lines.push(format!("{distinct}/{} errors distinguished", code.n()));
            if m.rows() != 4 || weights.iter().any(|&w| w != 8) || !in_group || distinct != code.n() {
                witness = Some("tetrahedral operators do not separate all single X errors".into());
            }
        }
        CheckName::ClassicalDistance => {
            let c = r
                .classical
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("classical_distance needs a classical code".into()))?;
            let want = c.designed_distance();
            let found = c.min_distance_bruteforce(want);
            match found {
                Some(dist) if dist < want => {
                    lines.push(format!("distance {dist} below designed {want}"));
                    witness = Some(format!("codeword of weight {dist}"));
                }
                Some(dist) => lines.push(format!("distance {dist}")),
                None => lines.push(format!("distance >= {}", want + 1)),
            }
        }
        CheckName::CircuitDistance => {
            let code = need_code(r)?;
            let rule = r.rule.unwrap_or_else(|| OrderingRule::default_for(code));
            let t = code.d().saturating_sub(1) / 2;
            let identity = build_schedule(code, Strategy::Identity, r.rounds)?;
            let ph = build_fault_model(code, &identity, NoiseKind::Phenomenological, rule)?;
            let wcap = default_wcap(r.rounds, code.d());
            let weak = weak_ft_certificate(&ph, t, wcap, r.budget)?;
            lines.push(format!("weak_ft: {} fault sets of weight <= {t}, wcap {wcap}", weak.sets));
            if let Some(w) = weak.witness {
                witness = Some(format!("miscorrected fault set {w:?}"));
            }
            let cd = build_fault_model(code, &identity, NoiseKind::CircuitDepolarizing, rule)?;
            let wmax = code.d().saturating_sub(1);
            let probe = circuit_distance_probe(&cd, code, wmax, r.budget)?;
            lines.push(format!("probe: {} circuit faults, no bad set of weight <= {wmax}: {}", cd.faults().len(), probe.witness.is_none()));
            if witness.is_none() {
                if let Some(w) = probe.witness {
                    witness = Some(format!("undetected fault set {w:?}"));
                }
            }
        }
    }
    Ok(CertifyReport {
        check: r.check,
        passed: witness.is_none(),
        lines,
        witness,
    })
}

/// Classical code named on the command line.
pub fn classical_code(family: &str, length: usize, delta: usize) -> Result<ClassicalCode> {
    match family {
        "bch" => bch_parity_check(length, delta),
        "repetition" => repetition_parity_check(length),
        other => Err(Error::InvalidParameter(format!("unknown classical family {other:?}"))),
    }
}

/// How many shots each cell gets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ShotsRule {
    Fixed { shots: u64 },
    /// `ceil(multiplier / p)`.
    Plan { multiplier: f64 },
}

impl ShotsRule {
    pub fn shots(&self, p: f64) -> Result<u64> {
        match *self {
            ShotsRule::Fixed { shots } => Ok(shots),
            ShotsRule::Plan { multiplier } if p == 0.0 => Ok(multiplier.ceil() as u64),
            ShotsRule::Plan { multiplier } => plan_shots(p, multiplier),
        }
    }
}

/// A grid of simulation cells: every code against every `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub codes: Vec<CodeSpec>,
    pub strategy: Strategy,
    /// Rounds per shot; `None` uses each code's distance.
    #[serde(default)]
    pub rounds: Option<usize>,
    pub noise: NoiseKind,
    pub p_grid: Vec<f64>,
    pub decoder: DecoderChoice,
    pub shots: ShotsRule,
    pub seed: u64,
    #[serde(default = "one")]
    pub shards: usize,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub ordering: Option<OrderingRule>,
    /// Witness weight cap for the minimum-weight decoders; `None` is unbounded.
    #[serde(default)]
    pub wcap: Option<usize>,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.codes.is_empty() {
            return Err(Error::InvalidParameter("config lists no codes".into()));
        }
        if self.p_grid.is_empty() || self.p_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("p grid must be nonempty and strictly increasing".into()));
        }
        if self.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("p grid must lie in [0, 1]".into()));
        }
        if self.shards == 0 || self.rounds == Some(0) {
            return Err(Error::InvalidParameter("shards and rounds must be >= 1".into()));
        }
        if let ShotsRule::Plan { multiplier } = self.shots {
            if multiplier.is_nan() || multiplier <= 0.0 {
                return Err(Error::InvalidParameter("shot multiplier must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub const LEDGER_FILE: &str = "ledger.csv";

/// Run every cell and write `ledger.csv` (replacing any previous one) and a
/// copy of the config into the output directory, resolved against `base`.
pub fn cmd_simulate(config: &ExperimentConfig, base: &Path) -> Result<Vec<TrialBatch>> {
    config.validate()?;
    let out = base.join(&config.output_dir);
    fs::create_dir_all(&out)?;
    let mut rows = Vec::new();
    for spec in &config.codes {
        let code = spec.build()?;
        let rounds = config.rounds.unwrap_or(code.d());
        let schedule = build_schedule(&code, config.strategy, rounds)?;
        let rule = config.ordering.unwrap_or_else(|| OrderingRule::default_for(&code));
        let mwe = MweConfig {
            wcap: config.wcap,
            ..MweConfig::default()
        };
        let sim = Simulator::new(&code, &schedule, config.noise, config.decoder, rule, mwe)?;
        for &p in &config.p_grid {
            let shots = config.shots.shots(p)?;
            rows.extend(sim.run(p, shots, config.seed, config.shards)?);
        }
    }
    let ledger = out.join(LEDGER_FILE);
    if ledger.exists() {
        fs::remove_file(&ledger)?;
    }
    append_ledger(&ledger, &rows)?;
    let mut meta = serde_json::to_value(config)?;
    meta["prng"] = serde_json::Value::String(PRNG_ALGORITHM.into());
    meta["data_flip_probability"] = serde_json::Value::String("2p/3".into());
    fs::write(out.join("config.json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisTask {
    Crossing,
    Pseudothreshold,
    Slope,
    All,
}

impl std::str::FromStr for AnalysisTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Parse(format!("unknown analysis task {s:?}")))
    }
}

/// Analyze a ledger; returns the report and one TSV per curve, keyed by label.
pub fn cmd_analyze(ledger: &Path, task: AnalysisTask, slope_range: (f64, f64)) -> Result<(AnalysisReport, Vec<(String, String)>)> {
    let rows = read_ledger(ledger)?;
    let curves = curves_from_ledger(&rows)?;
    let mut report = AnalysisReport::from_curves(&curves, slope_range);
    match task {
        AnalysisTask::Crossing => {
            report.pseudothresholds.clear();
            report.slopes.clear();
        }
        AnalysisTask::Pseudothreshold => {
            report.crossings.clear();
            report.slopes.clear();
        }
        AnalysisTask::Slope => {
            report.crossings.clear();
            report.pseudothresholds.clear();
        }
        AnalysisTask::All => {}
    }
    let tsv = curves.iter().map(|(k, c)| (k.label(), c.to_tsv())).collect();
    Ok((report, tsv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_file_round_trip() {
        for spec in [
            CodeSpec::surface(3),
            CodeSpec { family: "tetrahedral".into(), d: None, base: None, levels: None },
            CodeSpec { family: "concat".into(), d: None, base: Some("steane".into()), levels: Some(2) },
        ] {
            let text = cmd_build(&spec).unwrap();
            let code = load_code(&text).unwrap();
            assert_eq!(code, spec.build().unwrap());
        }
        let text = cmd_build(&CodeSpec::surface(3)).unwrap();
        assert!(text.starts_with("9 1 3\n"));
        let tampered = text.replacen("110110000", "110110001", 1);
        assert!(load_code(&tampered).is_err());
        let custom = load_code(&CodeSpec::surface(3).build().unwrap().to_text()).unwrap();
        assert_eq!(custom.kind(), &CodeKind::Custom);
    }

    #[test]
    fn config_round_trip_and_validation() {
        let c = ExperimentConfig {
            codes: vec![CodeSpec::surface(3)],
            strategy: Strategy::Identity,
            rounds: None,
            noise: NoiseKind::CodeCapacity,
            p_grid: vec![0.01, 0.02],
            decoder: DecoderChoice::Lookup,
            shots: ShotsRule::Plan { multiplier: 10.0 },
            seed: 7,
            shards: 2,
            output_dir: "out".into(),
            ordering: None,
            wcap: None,
        };
        let text = c.to_json().unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json().unwrap(), text);
        let bad = ExperimentConfig { p_grid: vec![0.02, 0.01], ..c.clone() };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig { p_grid: vec![0.02, 0.02], ..c };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn certify_examples() {
        let base = CertifyRequest {
            check: CheckName::Theorem1,
            code: Some(rotated_surface_code(3).unwrap()),
            strategies: vec![],
            rounds: 3,
            classical: None,
            rule: None,
            budget: 100_000_000,
        };
        assert!(cmd_certify(&base).unwrap().passed);
        let t4 = cmd_certify(&CertifyRequest { check: CheckName::Tetrahedral4, code: None, ..base.clone() }).unwrap();
        assert!(t4.passed);
        assert!(t4.lines.iter().any(|l| l.contains("15/15")));
        let cd = cmd_certify(&CertifyRequest {
            check: CheckName::ClassicalDistance,
            classical: Some(classical_code("bch", 15, 5).unwrap()),
            ..base.clone()
        })
        .unwrap();
        assert!(cd.passed);
        assert_eq!(cd.lines, vec!["distance 5".to_string()]);
        let tiny = cmd_certify(&CertifyRequest { budget: 10, ..base });
        assert!(matches!(tiny, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn stats_table_has_formula() {
        let code = rotated_surface_code(5).unwrap();
        let (_, stats, table) = cmd_compress(&code, Strategy::RowPartitionRepetition, 1).unwrap();
        assert_eq!(stats.per_round_x + stats.per_round_z, 20);
        assert!(table.contains("formula_per_round\t20"));
        assert!(table.contains("formula_saving\t5"));
    }
}
