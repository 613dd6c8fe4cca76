use std::collections::HashMap;

use super::FaultModel;
use crate::error::{Error, Result};
use crate::gf2::{for_each_combination, BitMatrix, BitVec, RowSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    Ok,
    Failure,
}

/// Outcome of a decode: the chosen fault set and its logical effect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeVerdict {
    pub logical_flip: bool,
    /// Sorted fault indices whose combined syndrome equals the input.
    pub witness: Vec<usize>,
    pub status: DecodeStatus,
}

impl DecodeVerdict {
    pub fn failure() -> Self {
        Self {
            logical_flip: false,
            witness: Vec::new(),
            status: DecodeStatus::Failure,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == DecodeStatus::Ok
    }
}

/// `floor((rounds - 1) / 2) + floor((d - 1) / 2)`.
pub fn default_wcap(rounds: usize, d: usize) -> usize {
    rounds.saturating_sub(1) / 2 + d.saturating_sub(1) / 2
}

fn check_len(model: &FaultModel, observed: &BitVec) -> Result<()> {
    if observed.len() != model.syndrome_len() {
        return Err(Error::DimensionMismatch {
            op: "decode",
            left: (model.faults().len(), model.syndrome_len()),
            right: (observed.len(), 1),
        });
    }
    Ok(())
}

/// Reference decoder: tries fault sets of weight `0..=wcap` in increasing
/// weight and lexicographic order and returns the first whose syndrome
/// equals `observed`.
pub fn mwe_decode(model: &FaultModel, observed: &BitVec, wcap: usize) -> Result<DecodeVerdict> {
    check_len(model, observed)?;
    let faults = model.faults();
    let mut acc = BitVec::zeros(observed.len());
    let mut found = None;
    for w in 0..=wcap.min(faults.len()) {
        for_each_combination(faults.len(), w, |idx| {
            acc.clone_from(observed);
            for &i in idx {
                acc.xor_assign(&faults[i].signature);
            }
            if acc.is_zero() {
                found = Some(idx.to_vec());
            }
            found.is_none()
        });
        if found.is_some() {
            break;
        }
    }
    Ok(match found {
        Some(witness) => DecodeVerdict {
            logical_flip: witness.iter().fold(false, |l, &i| l ^ faults[i].logical),
            witness,
            status: DecodeStatus::Ok,
        },
        None => DecodeVerdict::failure(),
    })
}

/// Result of [`weak_ft_certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakFtReport {
    pub sets: u64,
    /// A fault set whose decoded logical differs from its true effect.
    pub witness: Option<Vec<usize>>,
}

impl WeakFtReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Decode every fault set of weight at most `t` with [`mwe_decode`] under
/// `wcap` and check the logical verdict against the true effect.
pub fn weak_ft_certificate(model: &FaultModel, t: usize, wcap: usize, budget: u64) -> Result<WeakFtReport> {
    let f = model.faults().len();
    let sets = (0..=t).fold(0u64, |a, w| a.saturating_add(crate::gf2::binomial(f, w)));
    if sets > budget {
        return Err(Error::BudgetExceeded {
            what: format!("{sets} fault sets"),
            budget,
        });
    }
    let mut witness = None;
    let mut err = None;
    for w in 0..=t {
        for_each_combination(f, w, |idx| {
            let (s, logical) = model.effect(idx);
            match mwe_decode(model, &s, wcap) {
                Ok(v) if v.is_ok() && v.logical_flip == logical => true,
                Ok(_) => {
                    witness = Some(idx.to_vec());
                    false
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if witness.is_some() {
            break;
        }
    }
    Ok(WeakFtReport { sets, witness })
}

/// Limits for [`MweDecoder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MweConfig {
    /// Largest witness weight considered; `None` searches until the budget runs out.
    pub wcap: Option<usize>,
    /// Fault sets enumerated while filling the syndrome table.
    pub table_budget: u64,
    /// Largest table, in syndromes.
    pub table_cap: usize,
    /// Prefixes tried by one decode once the table misses.
    pub prefix_budget: u64,
}

impl Default for MweConfig {
    fn default() -> Self {
        Self {
            wcap: None,
            table_budget: 20_000_000,
            table_cap: 1 << 20,
            prefix_budget: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
struct Entry {
    witness: Box<[u32]>,
    logical: bool,
}

/// Minimum-weight decoder with the same contract as [`mwe_decode`],
/// precomputed for repeated use.
///
/// Syndromes reached by small fault sets come from a table filled in
/// enumeration order. Misses fall back to a search that joins every
/// lexicographic prefix with an index of fault pairs.
#[derive(Clone, Debug)]
pub struct MweDecoder {
    config: MweConfig,
    sigs: Vec<BitVec>,
    logical: Vec<bool>,
    span: RowSpace,
    table: HashMap<BitVec, Entry>,
    /// Every fault set lighter than this is represented in `table`.
    table_weight: usize,
    table_complete: bool,
    singles: HashMap<BitVec, Vec<u32>>,
    pairs: HashMap<BitVec, Vec<(u32, u32)>>,
}

impl MweDecoder {
    pub fn new(model: &FaultModel, config: MweConfig) -> Result<Self> {
        let sigs: Vec<BitVec> = model.faults().iter().map(|f| f.signature.clone()).collect();
        let logical = model.faults().iter().map(|f| f.logical).collect();
        let len = model.syndrome_len();
        let span = RowSpace::new(&BitMatrix::from_rows(len, &sigs)?);
        let mut dec = Self {
            config,
            sigs,
            logical,
            span,
            table: HashMap::new(),
            table_weight: 0,
            table_complete: false,
            singles: HashMap::new(),
            pairs: HashMap::new(),
        };
        dec.fill_table(len);
        if !dec.table_complete {
            dec.index_small_sets();
        }
        Ok(dec)
    }

    pub fn config(&self) -> &MweConfig {
        &self.config
    }

    /// True when every reachable syndrome is in the table.
    pub fn table_complete(&self) -> bool {
        self.table_complete
    }

    fn fill_table(&mut self, len: usize) {
        let dim = self.span.dim();
        if dim >= usize::BITS as usize - 1 || (1usize << dim) > self.config.table_cap {
            return;
        }
        let target = 1usize << dim;
        let f = self.sigs.len();
        let wmax = self.config.wcap.unwrap_or(f).min(f);
        let mut spent = 0u64;
        let mut acc = BitVec::zeros(len);
        for w in 0..=wmax {
            let mut finished = true;
            for_each_combination(f, w, |idx| {
                if spent >= self.config.table_budget {
                    finished = false;
                    return false;
                }
                spent += 1;
                acc.clear();
                for &i in idx {
                    acc.xor_assign(&self.sigs[i]);
                }
                if !self.table.contains_key(&acc) {
                    let logical = idx.iter().fold(false, |l, &i| l ^ self.logical[i]);
                    let witness = idx.iter().map(|&i| i as u32).collect();
                    self.table.insert(acc.clone(), Entry { witness, logical });
                }
                self.table.len() < target
            });
            if self.table.len() == target {
                self.table_complete = true;
                self.table_weight = w + 1;
                return;
            }
            if !finished {
                self.table_weight = w;
                return;
            }
            self.table_weight = w + 1;
        }
        // Every set up to the cap was enumerated.
        self.table_complete = true;
    }

    fn index_small_sets(&mut self) {
        let f = self.sigs.len();
        for a in 0..f {
            self.singles.entry(self.sigs[a].clone()).or_default().push(a as u32);
            for b in a + 1..f {
                let mut s = self.sigs[a].clone();
                s.xor_assign(&self.sigs[b]);
                self.pairs.entry(s).or_default().push((a as u32, b as u32));
            }
        }
    }

    fn verdict(&self, witness: Vec<usize>) -> DecodeVerdict {
        DecodeVerdict {
            logical_flip: witness.iter().fold(false, |l, &i| l ^ self.logical[i]),
            witness,
            status: DecodeStatus::Ok,
        }
    }

    pub fn decode(&self, observed: &BitVec) -> DecodeVerdict {
        if let Some(e) = self.table.get(observed) {
            return DecodeVerdict {
                logical_flip: e.logical,
                witness: e.witness.iter().map(|&i| i as usize).collect(),
                status: DecodeStatus::Ok,
            };
        }
        if self.table_complete || observed.len() != self.span.cols() || !self.span.contains(observed) {
            return DecodeVerdict::failure();
        }
        if observed.is_zero() {
            return self.verdict(Vec::new());
        }
        let f = self.sigs.len();
        let wmax = self.config.wcap.unwrap_or(f).min(f);
        let mut budget = self.config.prefix_budget;
        for w in self.table_weight.max(1)..=wmax {
            match self.search(observed, w, &mut budget) {
                Search::Found(witness) => return self.verdict(witness),
                Search::Exhausted => return DecodeVerdict::failure(),
                Search::None => {}
            }
        }
        DecodeVerdict::failure()
    }

    fn search(&self, observed: &BitVec, w: usize, budget: &mut u64) -> Search {
        match w {
            1 => match self.singles.get(observed) {
                Some(v) => Search::Found(vec![v[0] as usize]),
                None => Search::None,
            },
            2 => match self.pairs.get(observed) {
                Some(v) => Search::Found(vec![v[0].0 as usize, v[0].1 as usize]),
                None => Search::None,
            },
            _ => {
                let f = self.sigs.len();
                let mut acc = observed.clone();
                let mut result = Search::None;
                for_each_combination(f.saturating_sub(2), w - 2, |prefix| {
                    if *budget == 0 {
                        result = Search::Exhausted;
                        return false;
                    }
                    *budget -= 1;
                    acc.clone_from(observed);
                    for &i in prefix {
                        acc.xor_assign(&self.sigs[i]);
                    }
                    let last = prefix[prefix.len() - 1] as u32;
                    if let Some(v) = self.pairs.get(&acc) {
                        let k = v.partition_point(|&(a, _)| a <= last);
                        if let Some(&(a, b)) = v.get(k) {
                            let mut witness = prefix.to_vec();
                            witness.extend([a as usize, b as usize]);
                            result = Search::Found(witness);
                            return false;
                        }
                    }
                    true
                });
                result
            }
        }
    }
}

enum Search {
    Found(Vec<usize>),
    None,
    Exhausted,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::OrderingRule;
    use crate::compress::{build_schedule, Strategy};
    use crate::decode::{build_fault_model, NoiseKind};
    use crate::qcode::rotated_surface_code;
    use proptest::prelude::*;

    fn model(d: usize, rounds: usize, kind: NoiseKind) -> FaultModel {
        let code = rotated_surface_code(d).unwrap();
        let s = build_schedule(&code, Strategy::Identity, rounds).unwrap();
        build_fault_model(&code, &s, kind, OrderingRule::SurfaceZigzag).unwrap()
    }

    #[test]
    fn default_cap() {
        assert_eq!(default_wcap(3, 3), 2);
        assert_eq!(default_wcap(5, 5), 4);
        assert_eq!(default_wcap(1, 3), 1);
    }

    #[test]
    fn trivial_examples() {
        let m = model(3, 3, NoiseKind::Phenomenological);
        let zero = BitVec::zeros(m.syndrome_len());
        let v = mwe_decode(&m, &zero, 2).unwrap();
        assert!(v.is_ok() && v.witness.is_empty() && !v.logical_flip);
        let flip = m
            .faults()
            .iter()
            .position(|f| matches!(f.kind, crate::decode::FaultKind::MeasurementFlip { .. }))
            .unwrap();
        let v = mwe_decode(&m, &m.faults()[flip].signature, 2).unwrap();
        assert_eq!(v.witness, vec![flip]);
        assert!(mwe_decode(&m, &BitVec::zeros(3), 2).is_err());
    }

    #[test]
    fn failure_beyond_cap() {
        let m = model(3, 1, NoiseKind::CodeCapacity);
        let v = mwe_decode(&m, &m.faults()[0].signature, 0).unwrap();
        assert_eq!(v.status, DecodeStatus::Failure);
    }

    #[test]
    fn weak_fault_tolerance_single_faults() {
        let m = model(3, 3, NoiseKind::Phenomenological);
        let cap = default_wcap(3, 3);
        let dec = MweDecoder::new(&m, MweConfig::default()).unwrap();
        for (i, f) in m.faults().iter().enumerate() {
            let v = mwe_decode(&m, &f.signature, cap).unwrap();
            assert!(v.is_ok(), "fault {i}");
            assert_eq!(v.logical_flip, f.logical, "fault {i}");
            assert_eq!(dec.decode(&f.signature), v);
        }
    }

    #[test]
    fn determinism() {
        let m = model(3, 3, NoiseKind::Phenomenological);
        let (s, _) = m.effect(&[2, 17, 30]);
        assert_eq!(mwe_decode(&m, &s, 3).unwrap(), mwe_decode(&m, &s, 3).unwrap());
    }

    fn check_against_reference(m: &FaultModel, config: MweConfig, sets: &[Vec<usize>], cap: usize) {
        let dec = MweDecoder::new(m, config).unwrap();
        for set in sets {
            let (s, _) = m.effect(set);
            let want = mwe_decode(m, &s, cap).unwrap();
            let got = dec.decode(&s);
            if want.is_ok() {
                assert_eq!(got, want, "set {set:?}");
            }
        }
    }

    #[test]
    fn prefix_search_matches_reference() {
        let m = model(3, 2, NoiseKind::Phenomenological);
        let config = MweConfig {
            table_cap: 0,
            ..MweConfig::default()
        };
        let sets: Vec<Vec<usize>> = (0..m.faults().len())
            .step_by(3)
            .flat_map(|a| [vec![a], vec![a, (a + 7) % 26], vec![a, (a * 5 + 1) % 26, (a * 3 + 11) % 26]])
            .map(|mut v| {
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        check_against_reference(&m, config, &sets, 4);
    }

    #[test]
    fn partial_table_matches_reference() {
        let m = model(3, 2, NoiseKind::Phenomenological);
        let config = MweConfig {
            table_budget: 500,
            ..MweConfig::default()
        };
        let dec = MweDecoder::new(&m, config).unwrap();
        assert!(!dec.table_complete());
        let sets: Vec<Vec<usize>> = (0..20).map(|a| vec![a, a + 3, a + 5]).collect();
        check_against_reference(&m, config, &sets, 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn decoder_equals_reference(set in prop::collection::btree_set(0usize..26, 0..4), table in any::<bool>()) {
            let m = model(3, 2, NoiseKind::Phenomenological);
            let config = MweConfig { table_cap: if table { 1 << 20 } else { 0 }, ..MweConfig::default() };
            let dec = MweDecoder::new(&m, config).unwrap();
            let set: Vec<usize> = set.into_iter().collect();
            let (s, _) = m.effect(&set);
            let want = mwe_decode(&m, &s, 4).unwrap();
            prop_assert!(want.is_ok());
            prop_assert!(want.witness.len() <= set.len());
            prop_assert_eq!(dec.decode(&s), want);
        }
    }
}
