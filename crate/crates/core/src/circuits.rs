//! Bare-ancilla circuits measuring products of stabilizer generators.
//!
//! One ancilla measures a whole composite stabilizer. Couplings run
//! generator block by generator block and overlapping qubits are coupled
//! once per block, never cancelled.
//!
//! Faults are tracked in the Z frame. For an X-type product the ancilla is
//! the control of every coupling, so a data Z before a coupling flips the
//! outcome and an ancilla Z only flips the outcome. For a Z-type product
//! the ancilla is the target, so an ancilla Z spreads onto every data qubit
//! coupled afterwards and the outcome itself carries no Z-frame information.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::compress::MeasurementSchedule;
use crate::decode::FaultModel;
use crate::error::{Error, Result};
use crate::gf2::{binomial, for_each_combination, BitVec, RowSpace};
use crate::qcode::{CodeKind, Corner, CssCode, Side, SurfaceLayout};

/// Coupling order inside each generator block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingRule {
    /// Rotated surface code only: X blocks run TL, BL, TR, BR and Z blocks
    /// TL, TR, BL, BR, so the last pair of each block lies across the
    /// logical operator its hook could extend.
    SurfaceZigzag,
    /// Ascending qubit index.
    IndexOrder,
    /// Rotated surface code only: the same corner order on both sides.
    Corners([Corner; 4]),
}

impl OrderingRule {
    /// Zigzag on rotated surface codes, index order elsewhere.
    pub fn default_for(code: &CssCode) -> Self {
        match code.kind() {
            CodeKind::Surface { .. } => OrderingRule::SurfaceZigzag,
            _ => OrderingRule::IndexOrder,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "surface_zigzag" => Ok(OrderingRule::SurfaceZigzag),
            "index_order" => Ok(OrderingRule::IndexOrder),
            other => Err(Error::Parse(format!("unknown ordering rule {other:?}"))),
        }
    }

    fn corners(self, side: Side) -> Option<[Corner; 4]> {
        use Corner::*;
        match (self, side) {
            (OrderingRule::SurfaceZigzag, Side::X) => Some([TopLeft, BottomLeft, TopRight, BottomRight]),
            (OrderingRule::SurfaceZigzag, Side::Z) => Some([TopLeft, TopRight, BottomLeft, BottomRight]),
            (OrderingRule::Corners(c), _) => Some(c),
            (OrderingRule::IndexOrder, _) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Prep,
    Couple { qubit: usize, generator: usize },
    Measure,
}

/// Where a fault strikes, just after `ops[after]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaultLocation {
    pub after: usize,
    pub target: FaultTarget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaultTarget {
    Ancilla,
    Data(usize),
    AncillaAndData(usize),
}

impl FaultTarget {
    /// Ancilla bit and data vector of the Z-frame fault.
    pub fn pauli(self, n: usize) -> (bool, BitVec) {
        match self {
            FaultTarget::Ancilla => (true, BitVec::zeros(n)),
            FaultTarget::Data(q) => (false, BitVec::from_indices(n, [q])),
            FaultTarget::AncillaAndData(q) => (true, BitVec::from_indices(n, [q])),
        }
    }
}

/// Z-frame effect of a fault at the end of its circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Propagation {
    pub residual: BitVec,
    pub flip: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementCircuit {
    side: Side,
    n: usize,
    ops: Vec<Op>,
    generators: Vec<usize>,
}

impl MeasurementCircuit {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Generators in the product, in block order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ops.iter().enumerate().filter_map(|(k, op)| match op {
            Op::Couple { qubit, .. } => Some((k, *qubit)),
            _ => None,
        })
    }

    pub fn coupling_count(&self) -> usize {
        self.couplings().count()
    }

    /// The three Z-frame alternatives of a two-qubit fault after each coupling.
    pub fn fault_locations(&self) -> Vec<FaultLocation> {
        self.couplings()
            .flat_map(|(k, q)| {
                [FaultTarget::Ancilla, FaultTarget::Data(q), FaultTarget::AncillaAndData(q)]
                    .map(|target| FaultLocation { after: k, target })
            })
            .collect()
    }

    /// Push a Z-frame fault inserted after `ops[after]` through the rest of
    /// the circuit.
    pub fn propagate(&self, after: usize, ancilla: bool, data: &BitVec) -> Propagation {
        let mut residual = data.clone();
        let mut flip = false;
        let mut a = ancilla;
        for op in &self.ops[after + 1..] {
            match (*op, self.side) {
                (Op::Couple { qubit, .. }, Side::X) => a ^= residual.get(qubit),
                (Op::Couple { qubit, .. }, Side::Z) => {
                    if a {
                        residual.flip(qubit);
                    }
                }
                (Op::Measure, Side::X) => flip = a,
                _ => {}
            }
        }
        Propagation { residual, flip }
    }

    /// Text dump: `PREP a`, one coupling per line, `MEAS a`, with a comment
    /// before each generator block.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut current = None;
        for op in &self.ops {
            match *op {
                Op::Prep => out.push_str("PREP a\n"),
                Op::Couple { qubit, generator } => {
                    if current != Some(generator) {
                        let _ = writeln!(out, "# {} generator {generator}", self.side);
                        current = Some(generator);
                    }
                    let _ = match self.side {
                        Side::X => writeln!(out, "CX a q{qubit}"),
                        Side::Z => writeln!(out, "CX q{qubit} a"),
                    };
                }
                Op::Measure => out.push_str("MEAS a\n"),
            }
        }
        out
    }
}

/// Circuit for the product of `generators` (rows of the `side` checks).
pub fn synthesize_product_measurement(
    code: &CssCode,
    side: Side,
    generators: &[usize],
    rule: OrderingRule,
) -> Result<MeasurementCircuit> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("product of no generators".into()));
    }
    let h = code.checks(side);
    if let Some(&g) = generators.iter().find(|&&g| g >= h.rows()) {
        return Err(Error::InvalidParameter(format!("generator {g} out of range")));
    }
    let layout = match (rule.corners(side), code.kind()) {
        (None, _) => None,
        (Some(c), CodeKind::Surface { d }) => Some((SurfaceLayout::new(*d)?, c)),
        (Some(_), _) => {
            return Err(Error::InvalidParameter(
                "surface corner ordering requested for a non-surface code".into(),
            ))
        }
    };
    let mut ops = vec![Op::Prep];
    for &g in generators {
        let qubits: Vec<usize> = match &layout {
            None => h.row(g).iter_ones().collect(),
            Some((lay, corners)) => {
                let p = lay.plaquettes(side)[g];
                corners.iter().filter_map(|&c| lay.corner(p, c)).collect()
            }
        };
        ops.extend(qubits.into_iter().map(|qubit| Op::Couple { qubit, generator: g }));
    }
    ops.push(Op::Measure);
    Ok(MeasurementCircuit {
        side,
        n: code.n(),
        ops,
        generators: generators.to_vec(),
    })
}

/// Apply a fault at `location` and propagate it to the circuit's end.
pub fn propagate_fault(c: &MeasurementCircuit, location: FaultLocation) -> Propagation {
    let (ancilla, data) = location.target.pauli(c.n);
    c.propagate(location.after, ancilla, &data)
}

/// Circuits for every per-round row of a schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleCircuits {
    pub rule: OrderingRule,
    pub x: Vec<MeasurementCircuit>,
    pub z: Vec<MeasurementCircuit>,
}

impl ScheduleCircuits {
    pub fn side(&self, side: Side) -> &[MeasurementCircuit] {
        match side {
            Side::X => &self.x,
            Side::Z => &self.z,
        }
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for side in [Side::X, Side::Z] {
            for (i, c) in self.side(side).iter().enumerate() {
                let _ = writeln!(out, "# {side} row {i}");
                out.push_str(&c.dump());
            }
        }
        out
    }
}

pub fn synthesize_schedule(
    code: &CssCode,
    schedule: &MeasurementSchedule,
    rule: OrderingRule,
) -> Result<ScheduleCircuits> {
    let build = |side: Side| -> Result<Vec<MeasurementCircuit>> {
        schedule
            .blocks(side)
            .iter()
            .map(|b| synthesize_product_measurement(code, side, b, rule))
            .collect()
    };
    Ok(ScheduleCircuits {
        rule,
        x: build(Side::X)?,
        z: build(Side::Z)?,
    })
}

/// Fewest additional single-qubit Z errors that turn `residual` into a
/// nontrivial logical: the minimum weight of `residual + logical_z + s`
/// over the Z stabilizer group.
pub fn logical_completion_weight(code: &CssCode, residual: &BitVec) -> Result<usize> {
    let stab = RowSpace::new(code.hz());
    if stab.dim() > 24 {
        return Err(Error::BudgetExceeded {
            what: format!("stabilizer group of dimension {}", stab.dim()),
            budget: 24,
        });
    }
    let basis: Vec<BitVec> = code.hz().row_vecs();
    let gens: Vec<BitVec> = code
        .hz()
        .independent_row_indices()
        .into_iter()
        .map(|i| basis[i].clone())
        .collect();
    let mut v = residual.clone();
    v.xor_assign(code.logical_z());
    let mut best = v.weight();
    // Gray-code walk over the group.
    for i in 1u64..1 << gens.len() {
        v.xor_assign(&gens[i.trailing_zeros() as usize]);
        best = best.min(v.weight());
    }
    Ok(best)
}

/// Result of [`circuit_distance_probe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeResult {
    pub wmax: usize,
    /// Smallest bad fault set found, as sorted fault indices.
    pub witness: Option<Vec<usize>>,
}

impl ProbeResult {
    pub fn weight(&self) -> Option<usize> {
        self.witness.as_ref().map(Vec::len)
    }
}

/// Search fault sets of weight at most `wmax` for one that leaves every
/// scheduled outcome trivial yet either acts as a nontrivial logical on the
/// final data or leaves a detectable data error at the end of every round.
/// The final readout is ignored.
pub fn circuit_distance_probe(model: &FaultModel, code: &CssCode, wmax: usize, budget: u64) -> Result<ProbeResult> {
    let f = model.faults().len();
    let total = (0..=wmax).fold(0u64, |a, w| a.saturating_add(binomial(f, w)));
    if total > budget {
        return Err(Error::BudgetExceeded {
            what: format!("{total} fault sets"),
            budget,
        });
    }
    let scheduled = model.scheduled_len();
    let rounds = model.rounds();
    let stab = RowSpace::new(code.hz());
    let mut witness = None;
    for w in 1..=wmax {
        for_each_combination(f, w, |idx| {
            let mut outcomes = BitVec::zeros(scheduled);
            for &i in idx {
                let sig = model.faults()[i].signature.slice(0, scheduled);
                outcomes.xor_assign(&sig);
            }
            if !outcomes.is_zero() {
                return true;
            }
            let mut data = BitVec::zeros(code.n());
            let mut dirty_every_round = true;
            for r in 0..rounds {
                for &i in idx {
                    if model.faults()[i].round == r {
                        data.xor_assign(&model.faults()[i].residual);
                    }
                }
                if code.hx().mul_vec(&data).is_zero() {
                    dirty_every_round = false;
                }
            }
            let logical = code.hx().mul_vec(&data).is_zero() && !stab.contains(&data);
            if logical || dirty_every_round {
                witness = Some(idx.to_vec());
                return false;
            }
            true
        });
        if witness.is_some() {
            break;
        }
    }
    Ok(ProbeResult { wmax, witness })
}
