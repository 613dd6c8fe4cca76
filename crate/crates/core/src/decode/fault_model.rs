use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuits::{synthesize_schedule, FaultTarget, MeasurementCircuit, Op, OrderingRule};
use crate::compress::MeasurementSchedule;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::qcode::{CssCode, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Data flips once, outcomes are perfect, one round.
    CodeCapacity,
    /// Data flips before each round and every outcome may flip.
    Phenomenological,
    /// Data flips before every composite measurement and every outcome may flip.
    PerMeasurementDepolarizing,
    /// Two-qubit faults after every coupling and every outcome may flip.
    CircuitDepolarizing,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 4] = [
        NoiseKind::CodeCapacity,
        NoiseKind::Phenomenological,
        NoiseKind::PerMeasurementDepolarizing,
        NoiseKind::CircuitDepolarizing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::CodeCapacity => "code_capacity",
            NoiseKind::Phenomenological => "phenomenological",
            NoiseKind::PerMeasurementDepolarizing => "per_measurement_depolarizing",
            NoiseKind::CircuitDepolarizing => "circuit_depolarizing",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown noise kind {s:?}")))
    }
}

/// Physical origin of an elementary fault.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaultKind {
    /// Z on a data qubit; `before_row` names the composite measurement it
    /// precedes in per-measurement noise.
    Data { qubit: usize, before_row: Option<(Side, usize)> },
    /// Flipped outcome of X-side row `row`.
    MeasurementFlip { row: usize },
    /// One Z-frame alternative after a coupling.
    Coupling { side: Side, row: usize, after: usize, target: FaultTarget },
}

/// How a site draws its fault.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteClass {
    /// Z flip with probability `2p/3`.
    Data,
    /// Outcome flip with probability `p`.
    Measurement,
    /// Three exclusive alternatives, each with probability `4p/15`.
    Coupling,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Site {
    pub class: SiteClass,
    pub faults: Range<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fault {
    pub round: usize,
    pub kind: FaultKind,
    /// Scheduled outcomes (round-major) followed by the final readout.
    pub signature: BitVec,
    /// Data error left at the end of the run.
    pub residual: BitVec,
    pub logical: bool,
}

/// Every elementary fault a noise kind allows on a schedule, with its
/// precomputed effect. Effects compose by XOR.
#[derive(Clone, Debug)]
pub struct FaultModel {
    kind: NoiseKind,
    n: usize,
    rounds: usize,
    per_round: usize,
    readout: usize,
    faults: Vec<Fault>,
    sites: Vec<Site>,
}

impl FaultModel {
    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// X-side outcomes per round.
    pub fn per_round(&self) -> usize {
        self.per_round
    }

    pub fn scheduled_len(&self) -> usize {
        self.rounds * self.per_round
    }

    pub fn readout_len(&self) -> usize {
        self.readout
    }

    pub fn syndrome_len(&self) -> usize {
        self.scheduled_len() + self.readout
    }

    pub fn faults(&self) -> &[Fault] {
        &self.faults
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// Combined syndrome and logical effect of a fault set.
    pub fn effect(&self, set: &[usize]) -> (BitVec, bool) {
        let mut s = BitVec::zeros(self.syndrome_len());
        let mut l = false;
        for &i in set {
            s.xor_assign(&self.faults[i].signature);
            l ^= self.faults[i].logical;
        }
        (s, l)
    }

    /// Outcome bits of round `r`.
    pub fn round_bits(&self, syndrome: &BitVec, r: usize) -> BitVec {
        syndrome.slice(r * self.per_round, (r + 1) * self.per_round)
    }

    pub fn readout_bits(&self, syndrome: &BitVec) -> BitVec {
        syndrome.slice(self.scheduled_len(), self.syndrome_len())
    }
}

/// Receives every fault site in walk order and picks the alternative that
/// fires, if any.
trait SiteVisitor {
    fn visit(&mut self, site: usize, class: SiteClass, alts: &[FaultKind]) -> Option<usize>;
}

impl<F: FnMut(usize, SiteClass, &[FaultKind]) -> Option<usize>> SiteVisitor for F {
    fn visit(&mut self, site: usize, class: SiteClass, alts: &[FaultKind]) -> Option<usize> {
        self(site, class, alts)
    }
}

/// Replays the schedule in the Z frame.
struct Walker<'a> {
    code: &'a CssCode,
    kind: NoiseKind,
    rounds: usize,
    x_rows: BitMatrix,
    z_count: usize,
    circuits: Option<(Vec<MeasurementCircuit>, Vec<MeasurementCircuit>)>,
}

struct Frame {
    data: BitVec,
    outcomes: BitVec,
    site: usize,
}

impl Walker<'_> {
    fn walk(&self, v: &mut dyn SiteVisitor) -> Frame {
        let m = self.x_rows.rows();
        let mut fr = Frame {
            data: BitVec::zeros(self.code.n()),
            outcomes: BitVec::zeros(self.rounds * m),
            site: 0,
        };
        for r in 0..self.rounds {
            if matches!(self.kind, NoiseKind::CodeCapacity | NoiseKind::Phenomenological) {
                self.data_sites(&mut fr, None, v);
            }
            for i in 0..m {
                if self.kind == NoiseKind::PerMeasurementDepolarizing {
                    self.data_sites(&mut fr, Some((Side::X, i)), v);
                }
                let mut bit = match &self.circuits {
                    Some((xc, _)) => self.run_circuit(&xc[i], i, &mut fr, v),
                    None => self.x_rows.row(i).dot(&fr.data),
                };
                if self.kind != NoiseKind::CodeCapacity {
                    let alts = [FaultKind::MeasurementFlip { row: i }];
                    bit ^= v.visit(fr.site, SiteClass::Measurement, &alts).is_some();
                    fr.site += 1;
                }
                fr.outcomes.set(r * m + i, bit);
            }
            for j in 0..self.z_count {
                match &self.circuits {
                    Some((_, zc)) => {
                        self.run_circuit(&zc[j], j, &mut fr, v);
                    }
                    None if self.kind == NoiseKind::PerMeasurementDepolarizing => {
                        self.data_sites(&mut fr, Some((Side::Z, j)), v);
                    }
                    None => {}
                }
            }
        }
        fr
    }

    fn data_sites(&self, fr: &mut Frame, before_row: Option<(Side, usize)>, v: &mut dyn SiteVisitor) {
        for qubit in 0..self.code.n() {
            let alts = [FaultKind::Data { qubit, before_row }];
            if v.visit(fr.site, SiteClass::Data, &alts).is_some() {
                fr.data.flip(qubit);
            }
            fr.site += 1;
        }
    }

    fn run_circuit(&self, c: &MeasurementCircuit, row: usize, fr: &mut Frame, v: &mut dyn SiteVisitor) -> bool {
        let mut a = false;
        for (k, op) in c.ops().iter().enumerate() {
            let Op::Couple { qubit, .. } = *op else { continue };
            match c.side() {
                Side::X => a ^= fr.data.get(qubit),
                Side::Z if a => fr.data.flip(qubit),
                Side::Z => {}
            }
            let targets = [FaultTarget::Ancilla, FaultTarget::Data(qubit), FaultTarget::AncillaAndData(qubit)];
            let alts = targets.map(|target| FaultKind::Coupling { side: c.side(), row, after: k, target });
            if let Some(alt) = v.visit(fr.site, SiteClass::Coupling, &alts) {
                let (anc, data) = targets[alt].pauli(fr.data.len());
                a ^= anc;
                fr.data.xor_assign(&data);
            }
            fr.site += 1;
        }
        c.side() == Side::X && a
    }
}

/// Enumerate every elementary fault of `kind` on `schedule` and record its
/// syndrome, final data residual and logical effect. Circuit noise
/// synthesizes circuits with `rule`; the other kinds ignore it. Code
/// capacity uses one perfect round and no readout; every other kind appends
/// a perfect readout of `Hx` on the final data.
pub fn build_fault_model(
    code: &CssCode,
    schedule: &MeasurementSchedule,
    kind: NoiseKind,
    rule: OrderingRule,
) -> Result<FaultModel> {
    let rounds = if kind == NoiseKind::CodeCapacity { 1 } else { schedule.rounds() };
    let circuits = if kind == NoiseKind::CircuitDepolarizing {
        let c = synthesize_schedule(code, schedule, rule)?;
        Some((c.x, c.z))
    } else {
        None
    };
    let walker = Walker {
        code,
        kind,
        rounds,
        x_rows: schedule.per_round(Side::X).clone(),
        z_count: schedule.per_round(Side::Z).rows(),
        circuits,
    };
    let readout = if kind == NoiseKind::CodeCapacity { 0 } else { code.hx().rows() };

    let mut sites: Vec<Site> = Vec::new();
    let mut kinds: Vec<FaultKind> = Vec::new();
    walker.walk(&mut |_, class, alts: &[FaultKind]| {
        let start = kinds.len();
        kinds.extend_from_slice(alts);
        sites.push(Site { class, faults: start..kinds.len() });
        None
    });
    let sites_per_round = sites.len() / rounds;

    let mut faults = Vec::with_capacity(kinds.len());
    for (s, site) in sites.iter().enumerate() {
        for (alt, fault) in site.faults.clone().enumerate() {
            let fr = walker.walk(&mut |idx, _, _: &[FaultKind]| (idx == s).then_some(alt));
            let mut signature = fr.outcomes;
            if readout > 0 {
                signature = signature.concat(&code.hx().mul_vec(&fr.data));
            }
            faults.push(Fault {
                round: s / sites_per_round,
                kind: kinds[fault],
                logical: code.logical_flip(&fr.data),
                residual: fr.data,
                signature,
            });
        }
    }
    Ok(FaultModel {
        kind,
        n: code.n(),
        rounds,
        per_round: walker.x_rows.rows(),
        readout,
        faults,
        sites,
    })
}
