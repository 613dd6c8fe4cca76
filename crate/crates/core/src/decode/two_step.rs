use super::{build_fault_model, DecodeVerdict, FaultKind, FaultModel, MweConfig, MweDecoder, NoiseKind};
use crate::circuits::OrderingRule;
use crate::classical::{ClassicalCode, ClassicalDecoder};
use crate::compress::{build_schedule, MeasurementSchedule, Strategy};
use crate::error::{Error, Result};
use crate::gf2::{binomial, for_each_combination, BitVec};
use crate::qcode::{CssCode, Side};

/// Generator-level space-time decoder: minimum-weight data flips between
/// rounds plus generator outcome flips, each at unit weight.
///
/// With one round it is a plain syndrome table over single-type data
/// errors. Raw per-round syndromes and their consecutive differences are
/// related by an invertible map, so decoding either gives the same witness.
#[derive(Clone, Debug)]
pub struct QuantumLookup {
    n: usize,
    generators: usize,
    rounds: usize,
    model: FaultModel,
    decoder: MweDecoder,
}

/// Data correction and logical verdict from [`QuantumLookup`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LookupResult {
    pub correction: BitVec,
    pub verdict: DecodeVerdict,
}

impl QuantumLookup {
    /// `rounds == 0` means a single perfect round (code capacity).
    pub fn new(code: &CssCode, rounds: usize, config: MweConfig) -> Result<Self> {
        let (kind, r) = match rounds {
            0 => (NoiseKind::CodeCapacity, 1),
            r => (NoiseKind::Phenomenological, r),
        };
        let schedule = build_schedule(code, Strategy::Identity, r)?;
        let model = build_fault_model(code, &schedule, kind, OrderingRule::IndexOrder)?;
        let decoder = MweDecoder::new(&model, config)?;
        if kind == NoiseKind::CodeCapacity && !decoder.table_complete() {
            return Err(Error::BudgetExceeded {
                what: format!("syndrome table for {} generators", code.hx().rows()),
                budget: config.table_cap as u64,
            });
        }
        Ok(Self {
            n: code.n(),
            generators: code.hx().rows(),
            rounds,
            model,
            decoder,
        })
    }

    /// Outcome rounds, zero for a single perfect round.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn model(&self) -> &FaultModel {
        &self.model
    }

    /// `syndrome` holds the X generator outcomes round by round, followed by
    /// a perfect final readout unless this is a single perfect round.
    pub fn decode(&self, syndrome: &BitVec) -> LookupResult {
        let verdict = self.decoder.decode(syndrome);
        let mut correction = BitVec::zeros(self.n);
        for &i in &verdict.witness {
            correction.xor_assign(&self.model.faults()[i].residual);
        }
        LookupResult { correction, verdict }
    }

    pub fn syndrome_len(&self) -> usize {
        self.model.syndrome_len()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }
}

/// One-shot [`QuantumLookup`].
pub fn quantum_lookup_decode(code: &CssCode, syndrome: &BitVec, rounds: usize) -> Result<LookupResult> {
    let q = QuantumLookup::new(code, rounds, MweConfig::default())?;
    if syndrome.len() != q.syndrome_len() {
        return Err(Error::DimensionMismatch {
            op: "quantum_lookup_decode",
            left: (q.generators(), q.syndrome_len()),
            right: (syndrome.len(), 1),
        });
    }
    Ok(q.decode(syndrome))
}

#[derive(Clone, Debug)]
enum SubsetDecoder {
    Identity,
    Table(ClassicalDecoder),
    Direct(ClassicalCode),
}

impl SubsetDecoder {
    fn decode(&self, s: &BitVec) -> Result<BitVec> {
        match self {
            SubsetDecoder::Identity => Ok(s.clone()),
            SubsetDecoder::Table(t) => t.decode(s),
            SubsetDecoder::Direct(c) => c.classical_mwe_decode(s),
        }
    }
}

#[derive(Clone, Debug)]
struct Subset {
    rows: Vec<usize>,
    offset: usize,
    len: usize,
    decoder: SubsetDecoder,
}

/// Decodes each round's compressed outcomes back to generator outcomes
/// with the subset compressors, then hands the sequence to a
/// [`QuantumLookup`].
#[derive(Clone, Debug)]
pub struct TwoStepDecoder {
    subsets: Vec<Subset>,
    per_round: usize,
    rounds: usize,
    readout: usize,
    quantum: QuantumLookup,
}

impl TwoStepDecoder {
    /// `single_round` selects the code-capacity layout: one perfect round and
    /// no final readout.
    pub fn new(code: &CssCode, schedule: &MeasurementSchedule, single_round: bool, config: MweConfig) -> Result<Self> {
        schedule.verify_against(code)?;
        let mut subsets = Vec::new();
        let mut offset = 0;
        for s in schedule.subsets_for(Side::X) {
            // A full-rank square compressor in reduced form is the identity.
            let decoder = if s.compressor.num_checks() == s.rows.len() {
                SubsetDecoder::Identity
            } else {
                match ClassicalDecoder::new(&s.compressor) {
                    Ok(t) => SubsetDecoder::Table(t),
                    Err(Error::BudgetExceeded { .. }) => SubsetDecoder::Direct(s.compressor.clone()),
                    Err(e) => return Err(e),
                }
            };
            let len = s.compressor.num_checks();
            subsets.push(Subset {
                rows: s.rows.clone(),
                offset,
                len,
                decoder,
            });
            offset += len;
        }
        let rounds = if single_round { 1 } else { schedule.rounds() };
        let quantum = QuantumLookup::new(code, if single_round { 0 } else { rounds }, config)?;
        Ok(Self {
            subsets,
            per_round: offset,
            rounds,
            readout: if single_round { 0 } else { code.hx().rows() },
            quantum,
        })
    }

    /// True when every compressor is the identity, so step one is a relabeling.
    pub fn is_uncompressed(&self) -> bool {
        self.subsets.iter().all(|s| s.len == s.rows.len())
    }

    pub fn quantum(&self) -> &QuantumLookup {
        &self.quantum
    }

    /// Generator outcomes estimated from compressed round outcomes laid out
    /// as in a fault model: rounds of compressed bits, then the readout.
    pub fn generator_syndrome(&self, observed: &BitVec) -> Result<BitVec> {
        let want = self.rounds * self.per_round + self.readout;
        if observed.len() != want {
            return Err(Error::DimensionMismatch {
                op: "two_step_decode",
                left: (self.rounds, self.per_round),
                right: (observed.len(), 1),
            });
        }
        let m = self.quantum.generators();
        let mut out = BitVec::zeros(self.rounds * m + self.readout);
        for r in 0..self.rounds {
            let base = r * self.per_round;
            for s in &self.subsets {
                let bits = observed.slice(base + s.offset, base + s.offset + s.len);
                let v = s.decoder.decode(&bits)?;
                for j in v.iter_ones() {
                    out.set(r * m + s.rows[j], true);
                }
            }
        }
        for i in 0..self.readout {
            out.set(self.rounds * m + i, observed.get(self.rounds * self.per_round + i));
        }
        Ok(out)
    }

    pub fn decode(&self, observed: &BitVec) -> DecodeVerdict {
        match self.generator_syndrome(observed) {
            Ok(s) => self.quantum.decode(&s).verdict,
            Err(_) => DecodeVerdict::failure(),
        }
    }
}

/// One-shot [`TwoStepDecoder`] over a multi-round schedule.
pub fn two_step_decode(code: &CssCode, schedule: &MeasurementSchedule, observed: &BitVec) -> Result<DecodeVerdict> {
    let dec = TwoStepDecoder::new(code, schedule, false, MweConfig::default())?;
    let s = dec.generator_syndrome(observed)?;
    Ok(dec.quantum.decode(&s).verdict)
}

/// A covered fault set on which the decoder or its first step misbehaved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStepCase {
    pub faults: Vec<usize>,
    pub data_errors: usize,
    pub flips: usize,
    /// Decoded logical differs from the true effect.
    pub miscorrected: bool,
    /// Some round's estimated generator outcomes differ from the true ones
    /// in more places than that round has flips.
    pub excess_round: Option<usize>,
}

/// Result of [`two_step_certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStepReport {
    /// Smallest maximum syndrome weight over the compressing subsets, `None`
    /// when nothing is compressed.
    pub w: Option<usize>,
    pub t: usize,
    pub cases: u64,
    /// First covered set decoded to the wrong logical.
    pub witness: Option<TwoStepCase>,
    /// Covered sets whose first step left more wrong generator outcomes in
    /// some round than that round has flips, with the first such set.
    pub excess: u64,
    pub first_excess: Option<TwoStepCase>,
}

impl TwoStepReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Exhaustive check of the two-step decoder under phenomenological noise:
/// every set of `s` data errors between rounds and `m` outcome flips with
/// `2s + m <= w` (or `s + m <= (d - 1) / 2` when nothing compresses) must
/// decode to the right logical. Rounds whose estimated generator outcomes
/// differ from the true ones in more places than they have flips are
/// counted separately.
pub fn two_step_certificate(code: &CssCode, schedule: &MeasurementSchedule, budget: u64) -> Result<TwoStepReport> {
    let model = build_fault_model(code, schedule, NoiseKind::Phenomenological, OrderingRule::IndexOrder)?;
    let config = MweConfig {
        prefix_budget: budget,
        ..MweConfig::default()
    };
    let dec = TwoStepDecoder::new(code, schedule, false, config)?;
    let w = schedule
        .subsets_for(Side::X)
        .filter(|s| s.compressor.num_checks() < s.rows.len())
        .map(|s| s.max_weight)
        .min();
    let t = code.d().saturating_sub(1) / 2;
    let data: Vec<usize> = (0..model.faults().len())
        .filter(|&i| matches!(model.faults()[i].kind, FaultKind::Data { .. }))
        .collect();
    let flips: Vec<usize> = (0..model.faults().len())
        .filter(|&i| matches!(model.faults()[i].kind, FaultKind::MeasurementFlip { .. }))
        .collect();
    let (s_max, m_max) = w.map_or((t, t), |w| (w / 2, w));
    let admissible = |s: usize, m: usize| match w {
        Some(w) => 2 * s + m <= w,
        None => s + m <= t,
    };
    let mut cases = 0u64;
    for s in 0..=s_max {
        for m in 0..=m_max {
            if admissible(s, m) {
                cases = cases.saturating_add(binomial(data.len(), s).saturating_mul(binomial(flips.len(), m)));
            }
        }
    }
    if cases > budget {
        return Err(Error::BudgetExceeded {
            what: format!("{cases} two-step cases"),
            budget,
        });
    }
    let hx = code.hx();
    let gens = hx.rows();
    let mut witness = None;
    let mut excess = 0u64;
    let mut first_excess = None;
    'outer: for s in 0..=s_max {
        for m in 0..=m_max {
            if !admissible(s, m) {
                continue;
            }
            let mut found = None;
            for_each_combination(data.len(), s, |di| {
                for_each_combination(flips.len(), m, |fi| {
                    let mut set: Vec<usize> = di.iter().map(|&i| data[i]).chain(fi.iter().map(|&i| flips[i])).collect();
                    set.sort_unstable();
                    let (syn, logical) = model.effect(&set);
                    let est = match dec.generator_syndrome(&syn) {
                        Ok(e) => e,
                        Err(_) => {
                            found = Some(TwoStepCase { faults: set, data_errors: s, flips: m, miscorrected: true, excess_round: None });
                            return false;
                        }
                    };
                    let mut excess_round = None;
                    let mut e = BitVec::zeros(code.n());
                    for r in 0..model.rounds() {
                        for &i in &set {
                            let f = &model.faults()[i];
                            if f.round == r && matches!(f.kind, FaultKind::Data { .. }) {
                                e.xor_assign(&f.residual);
                            }
                        }
                        let mut diff = est.slice(r * gens, (r + 1) * gens);
                        diff.xor_assign(&hx.mul_vec(&e));
                        let m_r = set
                            .iter()
                            .filter(|&&i| {
                                matches!(model.faults()[i].kind, FaultKind::MeasurementFlip { .. })
                                    && model.faults()[i].round == r
                            })
                            .count();
                        if diff.weight() > m_r && excess_round.is_none() {
                            excess_round = Some(r);
                        }
                    }
                    let v = dec.quantum.decode(&est).verdict;
                    let miscorrected = !v.is_ok() || v.logical_flip != logical;
                    let case = || TwoStepCase { faults: set.clone(), data_errors: s, flips: m, miscorrected, excess_round };
                    if excess_round.is_some() {
                        excess += 1;
                        if first_excess.is_none() {
                            first_excess = Some(case());
                        }
                    }
                    if miscorrected {
                        found = Some(case());
                        return false;
                    }
                    true
                });
                found.is_none()
            });
            if found.is_some() {
                witness = found;
                break 'outer;
            }
        }
    }
    Ok(TwoStepReport {
        w,
        t,
        cases,
        witness,
        excess,
        first_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::mwe_decode;
    use crate::qcode::rotated_surface_code;

    #[test]
    fn lookup_examples() {
        let code = rotated_surface_code(3).unwrap();
        let r = quantum_lookup_decode(&code, &BitVec::zeros(4), 0).unwrap();
        assert!(r.verdict.is_ok() && r.correction.is_zero());
        let center = BitVec::from_indices(9, [4]);
        let r = quantum_lookup_decode(&code, &code.hx().mul_vec(&center), 0).unwrap();
        assert_eq!(r.correction, center);
        assert!(quantum_lookup_decode(&code, &BitVec::zeros(5), 0).is_err());
    }

    /// Oracle: every weight-1 preimage of a syndrome, in index order.
    #[test]
    fn lookup_breaks_ties_by_index() {
        let code = rotated_surface_code(3).unwrap();
        let q = QuantumLookup::new(&code, 0, MweConfig::default()).unwrap();
        let mut ties = 0;
        for a in 0..9 {
            let s = code.hx().mul_vec(&BitVec::from_indices(9, [a]));
            let pre: Vec<usize> = (0..9)
                .filter(|&b| code.hx().mul_vec(&BitVec::from_indices(9, [b])) == s)
                .collect();
            let r = q.decode(&s);
            assert_eq!(r.correction, BitVec::from_indices(9, [pre[0]]));
            assert_eq!(r.verdict.logical_flip, code.logical_flip(&r.correction));
            ties += usize::from(pre.len() > 1);
        }
        assert!(ties > 0);
    }

    #[test]
    fn no_errors_decode_trivially() {
        let code = rotated_surface_code(5).unwrap();
        let s = build_schedule(&code, Strategy::RowPartitionRepetition, 3).unwrap();
        let m = build_fault_model(&code, &s, NoiseKind::Phenomenological, OrderingRule::IndexOrder).unwrap();
        let v = two_step_decode(&code, &s, &BitVec::zeros(m.syndrome_len())).unwrap();
        assert!(v.is_ok() && !v.logical_flip);
    }

    #[test]
    fn one_data_error_and_one_flip_at_distance_five() {
        let code = rotated_surface_code(5).unwrap();
        let s = build_schedule(&code, Strategy::RowPartitionRepetition, 3).unwrap();
        let m = build_fault_model(&code, &s, NoiseKind::Phenomenological, OrderingRule::IndexOrder).unwrap();
        let dec = TwoStepDecoder::new(&code, &s, false, MweConfig::default()).unwrap();
        assert!(!dec.is_uncompressed());
        let data: Vec<usize> = (0..m.faults().len())
            .filter(|&i| m.faults()[i].round == 0 && matches!(m.faults()[i].kind, FaultKind::Data { .. }))
            .collect();
        let flips: Vec<usize> = (0..m.faults().len())
            .filter(|&i| matches!(m.faults()[i].kind, FaultKind::MeasurementFlip { .. }))
            .collect();
        for &a in &data {
            for &b in &flips {
                let (syn, logical) = m.effect(&[a, b]);
                let v = dec.decode(&syn);
                assert!(v.is_ok());
                assert_eq!(v.logical_flip, logical, "faults {a} {b}");
            }
        }
    }

    #[test]
    fn theorem_holds_at_distance_three_and_five() {
        let code = rotated_surface_code(3).unwrap();
        let s = build_schedule(&code, Strategy::Identity, 3).unwrap();
        let r = two_step_certificate(&code, &s, 1_000_000).unwrap();
        assert!(r.passed(), "{:?}", r.witness);
        assert_eq!(r.w, None);
        let code = rotated_surface_code(5).unwrap();
        let s = build_schedule(&code, Strategy::RowPartitionRepetition, 2).unwrap();
        let r = two_step_certificate(&code, &s, 1_000_000).unwrap();
        assert!(r.passed(), "{:?}", r.witness);
        assert_eq!(r.w, Some(4));
        assert!(matches!(two_step_certificate(&code, &s, 10), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn mid_circuit_witness_at_distance_three() {
        let code = rotated_surface_code(3).unwrap();
        let s = build_schedule(&code, Strategy::FullBch, 3).unwrap();
        let m = build_fault_model(&code, &s, NoiseKind::PerMeasurementDepolarizing, OrderingRule::IndexOrder).unwrap();
        let dec = TwoStepDecoder::new(&code, &s, false, MweConfig::default()).unwrap();
        let mid = |i: usize| {
            matches!(m.faults()[i].kind, FaultKind::Data { before_row: Some((Side::X, r)), .. } if r > 0)
        };
        let mut witness = None;
        for w in 1..=2 {
            for_each_combination(m.faults().len(), w, |idx| {
                if !idx.iter().any(|&i| mid(i)) {
                    return true;
                }
                let (syn, logical) = m.effect(idx);
                let two = dec.decode(&syn);
                if two.is_ok() && two.logical_flip == logical {
                    return true;
                }
                let full = mwe_decode(&m, &syn, w).unwrap();
                if full.is_ok() && full.logical_flip == logical {
                    witness = Some(idx.to_vec());
                    return false;
                }
                true
            });
            if witness.is_some() {
                break;
            }
        }
        assert!(witness.is_some(), "two-step fails on some mid-circuit pattern");
    }
}
