//! Measurement schedules built by compressing stabilizer generators with
//! classical parity checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classical::{bch_parity_check, repetition_parity_check, ClassicalCode, CodeFamily};
use crate::error::{Error, Result};
use crate::gf2::{binomial, for_each_combination, BitMatrix, BitVec};
use crate::qcode::{
    max_syndrome_weight_budgeted, CodeKind, CssCode, Side, SurfaceLayout, EXACT_WEIGHT_BUDGET,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Identity,
    FullBch,
    DisjointPartitionBch,
    RowPartitionRepetition,
    GreedyLdpcPartitionBch,
    ConcatLevelsBch,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Identity,
        Strategy::FullBch,
        Strategy::DisjointPartitionBch,
        Strategy::RowPartitionRepetition,
        Strategy::GreedyLdpcPartitionBch,
        Strategy::ConcatLevelsBch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Identity => "identity",
            Strategy::FullBch => "full_bch",
            Strategy::DisjointPartitionBch => "disjoint_partition_bch",
            Strategy::RowPartitionRepetition => "row_partition_repetition",
            Strategy::GreedyLdpcPartitionBch => "greedy_ldpc_partition_bch",
            Strategy::ConcatLevelsBch => "concat_levels_bch",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown strategy {s:?}")))
    }
}

/// How a subset's maximum syndrome weight was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    Exact,
    LdpcBound,
    /// Not needed: the compressor does not depend on it.
    Unused,
}

/// One group of generators compressed together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetCompression {
    pub side: Side,
    /// Generator indices into the side's check matrix.
    pub rows: Vec<usize>,
    /// Compressor in reduced row echelon form.
    pub compressor: ClassicalCode,
    pub max_weight: usize,
    pub weight_source: WeightSource,
    /// The requested family could not compress and identity was used.
    pub fallback: bool,
}

impl SubsetCompression {
    /// Generator indices combined by row `i` of the compressor.
    pub fn block(&self, i: usize) -> Vec<usize> {
        self.compressor
            .checks()
            .row(i)
            .iter_ones()
            .map(|j| self.rows[j])
            .collect()
    }
}

/// Identity of the code a schedule was built for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeHeader {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub kind: CodeKind,
}

impl From<&CssCode> for CodeHeader {
    fn from(c: &CssCode) -> Self {
        Self {
            n: c.n(),
            k: c.k(),
            d: c.d(),
            kind: c.kind().clone(),
        }
    }
}

/// Composite stabilizers measured each round, repeated `rounds` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementSchedule {
    code: CodeHeader,
    strategy: Strategy,
    rounds: usize,
    x: BitMatrix,
    z: BitMatrix,
    subsets: Vec<SubsetCompression>,
}

impl MeasurementSchedule {
    pub fn code(&self) -> &CodeHeader {
        &self.code
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn per_round(&self, side: Side) -> &BitMatrix {
        match side {
            Side::X => &self.x,
            Side::Z => &self.z,
        }
    }

    pub fn subsets(&self) -> &[SubsetCompression] {
        &self.subsets
    }

    pub fn subsets_for(&self, side: Side) -> impl Iterator<Item = &SubsetCompression> {
        self.subsets.iter().filter(move |s| s.side == side)
    }

    /// Generator indices of every per-round row of `side`, in row order.
    pub fn blocks(&self, side: Side) -> Vec<Vec<usize>> {
        self.subsets_for(side)
            .flat_map(|s| (0..s.compressor.num_checks()).map(move |i| s.block(i)))
            .collect()
    }

    /// Same schedule with a different repetition count.
    pub fn with_rounds(&self, rounds: usize) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::InvalidParameter("rounds must be >= 1".into()));
        }
        Ok(Self {
            rounds,
            ..self.clone()
        })
    }

    /// All rounds of one side stacked into a single matrix.
    pub fn stacked(&self, side: Side) -> BitMatrix {
        let m = self.per_round(side);
        let copies: Vec<&BitMatrix> = vec![m; self.rounds];
        BitMatrix::vstack(m.cols(), &copies).expect("same width")
    }

    /// Recompute the per-round matrices from `code` and the subsets.
    pub fn verify_against(&self, code: &CssCode) -> Result<()> {
        if CodeHeader::from(code) != self.code {
            return Err(Error::InvalidParameter("schedule was built for another code".into()));
        }
        for side in [Side::X, Side::Z] {
            let rebuilt = assemble(code.checks(side), self.subsets_for(side))?;
            if &rebuilt != self.per_round(side) {
                return Err(Error::InvalidParameter(format!(
                    "{side} rows do not match their compressors"
                )));
            }
            let stab = crate::gf2::RowSpace::new(code.checks(side));
            if !self.per_round(side).row_vecs().iter().all(|r| stab.contains(r)) {
                return Err(Error::InvalidParameter(format!(
                    "{side} row outside the stabilizer group"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ScheduleDoc {
            code: self.code.clone(),
            strategy: self.strategy,
            rounds: self.rounds,
            x_rows: matrix_lines(&self.x),
            z_rows: matrix_lines(&self.z),
            provenance: ProvenanceDoc {
                strategy: self.strategy,
                compressor_form: "reduced_row_echelon".into(),
                generator_order: "row_major".into(),
                block_order: "index".into(),
                subsets: self
                    .subsets
                    .iter()
                    .map(|s| SubsetDoc {
                        side: s.side,
                        rows: s.rows.clone(),
                        family: s.compressor.family(),
                        length: s.compressor.length(),
                        designed_distance: s.compressor.designed_distance(),
                        checks: matrix_lines(s.compressor.checks()),
                        max_syndrome_weight: s.max_weight,
                        weight_source: s.weight_source,
                        fallback: s.fallback,
                    })
                    .collect(),
            },
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ScheduleDoc = serde_json::from_str(s)?;
        let x = parse_matrix_lines(&doc.x_rows)?;
        let z = parse_matrix_lines(&doc.z_rows)?;
        let subsets = doc
            .provenance
            .subsets
            .into_iter()
            .map(|sd| {
                let checks = parse_matrix_lines(&sd.checks)?;
                let text = format!("{} {}\n{}", sd.family, sd.designed_distance, checks.to_text());
                let compressor: ClassicalCode = text.parse()?;
                if compressor.length() != sd.length || sd.rows.len() != sd.length {
                    return Err(Error::Parse("subset length mismatch".into()));
                }
                Ok(SubsetCompression {
                    side: sd.side,
                    rows: sd.rows,
                    compressor,
                    max_weight: sd.max_syndrome_weight,
                    weight_source: sd.weight_source,
                    fallback: sd.fallback,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if doc.rounds == 0 {
            return Err(Error::Parse("rounds must be >= 1".into()));
        }
        Ok(Self {
            code: doc.code,
            strategy: doc.strategy,
            rounds: doc.rounds,
            x,
            z,
            subsets,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleDoc {
    code: CodeHeader,
    strategy: Strategy,
    rounds: usize,
    x_rows: Vec<String>,
    z_rows: Vec<String>,
    provenance: ProvenanceDoc,
}

#[derive(Serialize, Deserialize)]
struct ProvenanceDoc {
    strategy: Strategy,
    compressor_form: String,
    generator_order: String,
    block_order: String,
    subsets: Vec<SubsetDoc>,
}

#[derive(Serialize, Deserialize)]
struct SubsetDoc {
    side: Side,
    rows: Vec<usize>,
    family: CodeFamily,
    length: usize,
    designed_distance: usize,
    checks: Vec<String>,
    max_syndrome_weight: usize,
    weight_source: WeightSource,
    fallback: bool,
}

fn matrix_lines(m: &BitMatrix) -> Vec<String> {
    m.to_text().lines().map(str::to_owned).collect()
}

fn parse_matrix_lines(lines: &[String]) -> Result<BitMatrix> {
    let mut joined = lines.join("\n");
    joined.push('\n');
    joined.parse()
}

/// `P.checks * H`: each output row is the XOR of the generators selected by
/// one compressor check.
pub fn compress_checks(h: &BitMatrix, p: &ClassicalCode) -> Result<BitMatrix> {
    if p.length() != h.rows() {
        return Err(Error::DimensionMismatch {
            op: "compress_checks",
            left: p.checks().shape(),
            right: h.shape(),
        });
    }
    p.checks().matmul(h)
}

/// Split rows into groups with pairwise disjoint supports. Rows are taken in
/// index order and each joins the first group it does not overlap.
pub fn greedy_disjoint_partition(h: &BitMatrix, c: usize) -> Result<Vec<Vec<usize>>> {
    if h.max_col_weight() > c {
        return Err(Error::InvalidParameter(format!(
            "a column has weight {} > c = {c}",
            h.max_col_weight()
        )));
    }
    let mut groups: Vec<(BitVec, Vec<usize>)> = Vec::new();
    for i in 0..h.rows() {
        let row = h.row(i);
        match groups.iter_mut().find(|(cover, _)| !overlaps(cover, &row)) {
            Some((cover, members)) => {
                cover.xor_assign(&row);
                members.push(i);
            }
            None => groups.push((row, vec![i])),
        }
    }
    Ok(groups.into_iter().map(|(_, m)| m).collect())
}

fn overlaps(a: &BitVec, b: &BitVec) -> bool {
    a.words().iter().zip(b.words()).any(|(x, y)| x & y != 0)
}

/// Compose per-round rows with an outer code generator `G`.
///
/// When `G` has one row per row of `M` the result is `G^T M`: output row
/// `j` is the XOR of the rows of `M` selected by column `j` of `G`. When `G`
/// has a single row the result is `(G^T (x) I) M`, one copy of `M` for each
/// set entry of `G`; the repetition generator `[1 ... 1]` thus stacks
/// copies.
pub fn data_syndrome_compose(m: &BitMatrix, g: &BitMatrix) -> Result<BitMatrix> {
    if g.rows() == m.rows() {
        return g.transpose().matmul(m);
    }
    if g.rows() == 1 {
        let copies: Vec<&BitMatrix> = (0..g.cols()).filter(|&j| g.get(0, j)).map(|_| m).collect();
        return BitMatrix::vstack(m.cols(), &copies);
    }
    Err(Error::DimensionMismatch {
        op: "data_syndrome_compose",
        left: m.shape(),
        right: g.shape(),
    })
}

/// Repetition-code generator `[1 ... 1]` of length `d`.
pub fn repetition_generator(d: usize) -> BitMatrix {
    BitMatrix::from_rows(d, &[BitVec::from_indices(d, 0..d)]).expect("width d")
}

/// Build the schedule for `code` under `strategy`, X and Z independently.
pub fn build_schedule(code: &CssCode, strategy: Strategy, rounds: usize) -> Result<MeasurementSchedule> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be >= 1".into()));
    }
    let mut subsets = Vec::new();
    for side in [Side::X, Side::Z] {
        let h = code.checks(side);
        for rows in partition(code, side, strategy)? {
            subsets.push(compress_subset(h, code.d(), side, rows, strategy)?);
        }
    }
    let x = assemble(code.hx(), subsets.iter().filter(|s| s.side == Side::X))?;
    let z = assemble(code.hz(), subsets.iter().filter(|s| s.side == Side::Z))?;
    Ok(MeasurementSchedule {
        code: code.into(),
        strategy,
        rounds,
        x,
        z,
        subsets,
    })
}

fn assemble<'a>(
    h: &BitMatrix,
    subsets: impl Iterator<Item = &'a SubsetCompression>,
) -> Result<BitMatrix> {
    let mut blocks = Vec::new();
    for s in subsets {
        blocks.push(compress_checks(&h.select_rows(&s.rows), &s.compressor)?);
    }
    let refs: Vec<&BitMatrix> = blocks.iter().collect();
    BitMatrix::vstack(h.cols(), &refs)
}

fn partition(code: &CssCode, side: Side, strategy: Strategy) -> Result<Vec<Vec<usize>>> {
    let h = code.checks(side);
    let all = || vec![(0..h.rows()).collect::<Vec<_>>()];
    let surface = |what: &str| -> Result<SurfaceLayout> {
        match code.kind() {
            CodeKind::Surface { d } => SurfaceLayout::new(*d),
            _ => Err(Error::StrategyInapplicable(format!(
                "{what} needs the rotated surface layout"
            ))),
        }
    };
    Ok(match strategy {
        Strategy::Identity | Strategy::FullBch => all(),
        Strategy::DisjointPartitionBch => {
            let layout = surface("disjoint_partition_bch")?;
            let key = |&(i, j): &(usize, usize)| match side {
                Side::X => j % 2,
                Side::Z => i % 2,
            };
            let plaq = layout.plaquettes(side);
            (0..2)
                .map(|parity| (0..plaq.len()).filter(|&r| key(&plaq[r]) == parity).collect())
                .collect()
        }
        Strategy::RowPartitionRepetition => {
            let layout = surface("row_partition_repetition")?;
            let d = layout.d();
            if d < 5 {
                return Err(Error::StrategyInapplicable(
                    "row_partition_repetition needs d >= 5 for disjoint row pairs".into(),
                ));
            }
            let groups = (d - 1) / 2;
            let line = |&(i, j): &(usize, usize)| match side {
                Side::X => i,
                Side::Z => j,
            };
            let plaq = layout.plaquettes(side);
            (0..groups)
                .map(|g| {
                    (0..plaq.len())
                        .filter(|&r| (line(&plaq[r]) - 1) % groups == g)
                        .collect()
                })
                .collect()
        }
        Strategy::GreedyLdpcPartitionBch => greedy_disjoint_partition(h, h.max_col_weight())?,
        Strategy::ConcatLevelsBch => {
            if !matches!(code.kind(), CodeKind::Concatenated { .. }) {
                return Err(Error::StrategyInapplicable(
                    "concat_levels_bch needs a concatenated code".into(),
                ));
            }
            let levels = code.levels(side);
            let top = levels.iter().copied().max().unwrap_or(0);
            (0..=top)
                .map(|l| (0..levels.len()).filter(|&r| levels[r] == l).collect())
                .collect()
        }
    })
}

fn subset_weight(h_sub: &BitMatrix, d: usize) -> (usize, WeightSource) {
    match max_syndrome_weight_budgeted(h_sub, d, EXACT_WEIGHT_BUDGET) {
        Ok(w) => (w, WeightSource::Exact),
        Err(_) => (h_sub.max_col_weight() * d.saturating_sub(1), WeightSource::LdpcBound),
    }
}

fn compress_subset(
    h: &BitMatrix,
    d: usize,
    side: Side,
    rows: Vec<usize>,
    strategy: Strategy,
) -> Result<SubsetCompression> {
    let h_sub = h.select_rows(&rows);
    let l = rows.len();
    let (max_weight, weight_source, compressor, fallback) = match strategy {
        Strategy::Identity => (0, WeightSource::Unused, ClassicalCode::identity(l, 1), false),
        Strategy::RowPartitionRepetition => {
            let (w, src) = subset_weight(&h_sub, d);
            if l < 2 || w + 1 > l {
                return Err(Error::StrategyInapplicable(format!(
                    "repetition({l}) cannot detect syndrome weight {w}"
                )));
            }
            (w, src, repetition_parity_check(l)?, false)
        }
        _ => {
            let (w, src) = subset_weight(&h_sub, d);
            let p = bch_parity_check(l, (w + 1).max(2))?;
            let fb = p.family() == CodeFamily::Identity;
            (w, src, p, fb)
        }
    };
    Ok(SubsetCompression {
        side,
        rows,
        compressor: compressor.canonical(),
        max_weight,
        weight_source,
        fallback,
    })
}

/// Measurement accounting for one schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStats {
    pub per_round_x: usize,
    pub per_round_z: usize,
    pub per_round: usize,
    pub rounds: usize,
    pub total: usize,
    pub generators: usize,
    pub max_weight_x: usize,
    pub max_weight_z: usize,
    pub mean_weight_x: f64,
    pub mean_weight_z: f64,
    pub fallback_subsets: usize,
    /// Closed-form per-round count for the strategy, where one exists.
    pub formula_per_round: Option<usize>,
    pub formula_total: Option<usize>,
    /// Generator count in the `d^2` bookkeeping for the surface code.
    pub formula_generators: Option<usize>,
}

pub fn schedule_stats(s: &MeasurementSchedule) -> ScheduleStats {
    let weights = |m: &BitMatrix| -> (usize, f64) {
        let w: Vec<usize> = (0..m.rows()).map(|i| m.row_weight(i)).collect();
        let max = w.iter().copied().max().unwrap_or(0);
        let mean = if w.is_empty() { 0.0 } else { w.iter().sum::<usize>() as f64 / w.len() as f64 };
        (max, mean)
    };
    let (max_weight_x, mean_weight_x) = weights(&s.x);
    let (max_weight_z, mean_weight_z) = weights(&s.z);
    let per_round = s.x.rows() + s.z.rows();
    let generators = s
        .subsets
        .iter()
        .map(|sub| sub.rows.len())
        .sum();
    let formula_per_round = match s.code.kind {
        CodeKind::Surface { d } => surface_formula(d, s.strategy),
        _ => None,
    };
    ScheduleStats {
        per_round_x: s.x.rows(),
        per_round_z: s.z.rows(),
        per_round,
        rounds: s.rounds,
        total: per_round * s.rounds,
        generators,
        max_weight_x,
        max_weight_z,
        mean_weight_x,
        mean_weight_z,
        fallback_subsets: s.subsets.iter().filter(|x| x.fallback).count(),
        formula_per_round,
        formula_total: formula_per_round.map(|f| f * s.rounds),
        formula_generators: match s.code.kind {
            CodeKind::Surface { d } => Some(d * d),
            _ => None,
        },
    }
}

/// Closed-form per-round counts for the surface code: `d^2` for full
/// measurement, `ceil(2d log2(d^2 + 1))` for one BCH code over all
/// generators and `(d^2 - 1) - (d - 1)` for the repetition row pairing.
pub fn surface_formula(d: usize, strategy: Strategy) -> Option<usize> {
    match strategy {
        Strategy::Identity => Some(d * d),
        Strategy::FullBch => Some((2.0 * d as f64 * ((d * d + 1) as f64).log2()).ceil() as usize),
        Strategy::RowPartitionRepetition => Some(d * d - 1 - (d - 1)),
        _ => None,
    }
}

/// The four weight-8 Z operators obtained by compressing each of the face
/// triples `{C_i \ C_j, C_i & C_j, C_j \ C_i}` for
/// `(i, j) in {(0,1), (1,2), (2,3), (3,0)}` with the length-3 repetition
/// code, dropping the rows produced twice.
pub fn tetrahedral_sufficient_z() -> BitMatrix {
    let faces = crate::qcode::tetrahedral_faces();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let inter = |i: usize, j: usize| {
        pairs
            .iter()
            .position(|&p| p == (i.min(j), i.max(j)))
            .expect("distinct cells")
    };
    let diff = |i: usize, j: usize| 6 + i * 3 + if j < i { j } else { j - 1 };
    let rep = repetition_parity_check(3).expect("length 3");
    let mut out: Vec<BitVec> = Vec::new();
    for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        let triple = [faces[diff(i, j)].clone(), faces[inter(i, j)].clone(), faces[diff(j, i)].clone()];
        let h = BitMatrix::from_rows(15, &triple).expect("width 15");
        for row in compress_checks(&h, &rep).expect("3 rows").row_vecs() {
            if !out.contains(&row) {
                out.push(row);
            }
        }
    }
    BitMatrix::from_rows(15, &out).expect("width 15")
}

/// Outcome of an exhaustive detectability check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Report {
    pub patterns: u64,
    pub witness: Option<(Side, BitVec)>,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// For every error `e` of weight at most `d - 1` and every subset `A`,
/// check `(P_A H_A) e = 0` exactly when `H_A e = 0`, and the same for the
/// full per-round matrix against `H`.
pub fn theorem1_certificate(
    code: &CssCode,
    schedule: &MeasurementSchedule,
    sides: &[Side],
    budget: u64,
) -> Result<Theorem1Report> {
    let n = code.n();
    let e = code.d().saturating_sub(1).min(n);
    let per_side = (0..=e).fold(0u64, |a, w| a.saturating_add(binomial(n, w)));
    let patterns = per_side.saturating_mul(sides.len() as u64);
    if patterns > budget {
        return Err(Error::BudgetExceeded {
            what: format!("theorem-1 enumeration of {patterns} patterns"),
            budget,
        });
    }
    for &side in sides {
        let h = code.checks(side);
        let mut parts: Vec<(BitMatrix, BitMatrix)> = schedule
            .subsets_for(side)
            .map(|s| {
                let hs = h.select_rows(&s.rows);
                let ph = compress_checks(&hs, &s.compressor).expect("shapes agree");
                (hs, ph)
            })
            .collect();
        parts.push((h.clone(), schedule.per_round(side).clone()));
        let cols: Vec<Vec<(BitVec, BitVec)>> = parts
            .iter()
            .map(|(hs, ph)| (0..n).map(|j| (hs.column(j), ph.column(j))).collect())
            .collect();
        let mut witness = None;
        for w in 0..=e {
            for_each_combination(n, w, |idx| {
                for (part, (hs, ph)) in cols.iter().zip(&parts) {
                    let mut a = BitVec::zeros(hs.rows());
                    let mut b = BitVec::zeros(ph.rows());
                    for &j in idx {
                        a.xor_assign(&part[j].0);
                        b.xor_assign(&part[j].1);
                    }
                    if a.is_zero() != b.is_zero() {
                        witness = Some(BitVec::from_indices(n, idx.iter().copied()));
                        return false;
                    }
                }
                true
            });
            if let Some(v) = witness {
                return Ok(Theorem1Report {
                    patterns,
                    witness: Some((side, v)),
                });
            }
        }
    }
    Ok(Theorem1Report {
        patterns,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::bch_parity_check;
    use crate::qcode::{concatenate, rotated_surface_code, steane_code, tetrahedral_code, DEFAULT_QUBIT_CAP};

    #[test]
    fn compress_examples() {
        let code = rotated_surface_code(5).unwrap();
        let h = code.hx();
        assert_eq!(&compress_checks(h, &ClassicalCode::identity(12, 1)).unwrap(), h);
        let rep = compress_checks(h, &repetition_parity_check(12).unwrap()).unwrap();
        for i in 0..11 {
            let mut expect = h.row(i);
            expect.xor_assign(&h.row(i + 1));
            assert_eq!(rep.row(i), expect);
        }
        let bch = bch_parity_check(12, 9).unwrap();
        assert_eq!(bch.family(), CodeFamily::Identity);
        assert_eq!(&compress_checks(h, &bch).unwrap(), h);
        assert!(compress_checks(h, &repetition_parity_check(5).unwrap()).is_err());
    }

    #[test]
    fn compress_matches_dense_product() {
        let code = rotated_surface_code(5).unwrap();
        let p = bch_parity_check(12, 5).unwrap();
        let got = compress_checks(code.hx(), &p).unwrap();
        assert_eq!(got.rows(), p.num_checks());
        for i in 0..got.rows() {
            for j in 0..25 {
                let bit = (0..12).fold(false, |acc, k| acc ^ (p.checks().get(i, k) & code.hx().get(k, j)));
                assert_eq!(got.get(i, j), bit);
            }
        }
    }

    #[test]
    fn greedy_partition_examples() {
        let disjoint = BitMatrix::from_dense(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(greedy_disjoint_partition(&disjoint, 1).unwrap(), vec![vec![0, 1, 2]]);
        let s3 = rotated_surface_code(3).unwrap();
        assert_eq!(greedy_disjoint_partition(s3.hx(), 2).unwrap(), vec![vec![0, 1], vec![2, 3]]);
        let s7 = rotated_surface_code(7).unwrap();
        let parts = greedy_disjoint_partition(s7.hx(), 2).unwrap();
        assert!(parts.len() <= 5);
        for p in &parts {
            for (a, &i) in p.iter().enumerate() {
                for &j in &p[a + 1..] {
                    assert!(!overlaps(&s7.hx().row(i), &s7.hx().row(j)));
                }
            }
        }
        assert!(greedy_disjoint_partition(s3.hx(), 1).is_err());
    }

    #[test]
    fn identity_schedule_counts() {
        let code = rotated_surface_code(3).unwrap();
        let s = build_schedule(&code, Strategy::Identity, 3).unwrap();
        let st = schedule_stats(&s);
        assert_eq!(st.per_round, 8);
        assert_eq!(st.total, 24);
        assert_eq!(st.max_weight_x, 4);
        assert_eq!(st.formula_generators, Some(9));
        assert_eq!(s.per_round(Side::X), code.hx());
    }

    #[test]
    fn full_bch_falls_back_at_small_distance() {
        for d in [3, 5] {
            let code = rotated_surface_code(d).unwrap();
            let s = build_schedule(&code, Strategy::FullBch, 1).unwrap();
            let st = schedule_stats(&s);
            assert_eq!(st.per_round, d * d - 1);
            assert_eq!(st.fallback_subsets, 2);
            assert!(s.subsets().iter().all(|x| x.weight_source == WeightSource::Exact));
        }
    }

    #[test]
    fn row_partition_saves_d_minus_one() {
        for d in [5, 7, 9] {
            let code = rotated_surface_code(d).unwrap();
            let s = build_schedule(&code, Strategy::RowPartitionRepetition, 1).unwrap();
            assert_eq!(schedule_stats(&s).per_round, d * d - 1 - (d - 1));
            assert_eq!(s.subsets().len(), d - 1);
        }
        let s3 = rotated_surface_code(3).unwrap();
        assert!(matches!(
            build_schedule(&s3, Strategy::RowPartitionRepetition, 1),
            Err(Error::StrategyInapplicable(_))
        ));
    }

    #[test]
    fn d17_accounting() {
        let code = rotated_surface_code(17).unwrap();
        let s = build_schedule(&code, Strategy::FullBch, 17).unwrap();
        let st = schedule_stats(&s);
        let f = st.formula_per_round.unwrap();
        assert!(f.abs_diff(278) <= 2, "{f}");
        assert!(st.formula_total.unwrap().abs_diff(4726) <= 34);
        assert!(st.per_round < 288);
        assert!(s.subsets().iter().all(|x| x.weight_source == WeightSource::LdpcBound));
    }

    #[test]
    fn inapplicable_strategies_are_named() {
        let t = tetrahedral_code();
        for st in [Strategy::DisjointPartitionBch, Strategy::RowPartitionRepetition, Strategy::ConcatLevelsBch] {
            match build_schedule(&t, st, 1) {
                Err(Error::StrategyInapplicable(msg)) => assert!(!msg.is_empty()),
                other => panic!("{st}: {other:?}"),
            }
        }
        assert!(build_schedule(&t, Strategy::Identity, 0).is_err());
    }

    #[test]
    fn every_row_is_a_stabilizer() {
        let c2 = concatenate(&steane_code(), 2, DEFAULT_QUBIT_CAP).unwrap();
        let codes = [rotated_surface_code(5).unwrap(), rotated_surface_code(7).unwrap(), tetrahedral_code(), c2];
        for code in &codes {
            for st in Strategy::ALL {
                if let Ok(s) = build_schedule(code, st, 2) {
                    s.verify_against(code).unwrap();
                }
            }
        }
    }

    #[test]
    fn theorem1_on_small_codes() {
        let codes = [rotated_surface_code(3).unwrap(), rotated_surface_code(5).unwrap(), tetrahedral_code()];
        for code in &codes {
            for st in Strategy::ALL {
                let Ok(s) = build_schedule(code, st, 1) else { continue };
                let r = theorem1_certificate(code, &s, &[Side::X, Side::Z], u64::MAX).unwrap();
                assert!(r.passed(), "{st}");
            }
        }
    }

    #[test]
    fn theorem1_detects_a_weak_compressor() {
        let code = rotated_surface_code(3).unwrap();
        let mut s = build_schedule(&code, Strategy::Identity, 1).unwrap();
        let rep = repetition_parity_check(4).unwrap().canonical();
        s.subsets.retain(|x| x.side == Side::Z);
        s.subsets.insert(
            0,
            SubsetCompression {
                side: Side::X,
                rows: vec![0, 1, 2, 3],
                compressor: ClassicalCode::from_checks(&rep.checks().select_rows(&[0]), 2, CodeFamily::Bch),
                max_weight: 4,
                weight_source: WeightSource::Exact,
                fallback: false,
            },
        );
        s.x = assemble(code.hx(), s.subsets_for(Side::X)).unwrap();
        let r = theorem1_certificate(&code, &s, &[Side::X], u64::MAX).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn data_syndrome_examples() {
        let m = BitMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(data_syndrome_compose(&m, &repetition_generator(1)).unwrap(), m);
        let three = data_syndrome_compose(&m, &repetition_generator(3)).unwrap();
        assert_eq!(three.rows(), 6);
        for i in 0..2 {
            assert_eq!(three.row(i), three.row(i + 2));
            assert_eq!(three.row(i), three.row(i + 4));
        }

        let outer = bch_parity_check(25, 3).unwrap();
        let g = outer.generator_matrix();
        let code = rotated_surface_code(5).unwrap();
        let sched = build_schedule(&code, Strategy::RowPartitionRepetition, 1).unwrap();
        let m20 = sched.per_round(Side::X).clone();
        let big = BitMatrix::vstack(25, &[&m20, sched.per_round(Side::Z)]).unwrap();
        assert_eq!(big.rows(), 20);
        let composed = data_syndrome_compose(&big, &g).unwrap();
        assert_eq!(composed.rows(), 25);
        for j in 0..25 {
            let mut expect = BitVec::zeros(25);
            for i in 0..20 {
                if g.get(i, j) {
                    expect.xor_assign(&big.row(i));
                }
            }
            assert_eq!(composed.row(j), expect);
        }
        assert!(data_syndrome_compose(&m, &BitMatrix::zeros(3, 4)).is_err());
    }

    #[test]
    fn repetition_outer_code_is_round_stacking() {
        let code = rotated_surface_code(5).unwrap();
        let s = build_schedule(&code, Strategy::RowPartitionRepetition, 5).unwrap();
        let composed = data_syndrome_compose(s.per_round(Side::X), &repetition_generator(5)).unwrap();
        assert_eq!(composed, s.stacked(Side::X));
    }

    #[test]
    fn tetrahedral_four_checks() {
        let z4 = tetrahedral_sufficient_z();
        assert_eq!(z4.rows(), 4);
        let code = tetrahedral_code();
        let mut seen = std::collections::HashSet::new();
        for i in 0..4 {
            assert_eq!(z4.row_weight(i), 8);
            assert!(code.hz().row_space_contains(&z4.row(i)));
        }
        for q in 0..15 {
            let s = z4.mul_vec(&BitVec::from_indices(15, [q]));
            assert!(!s.is_zero());
            assert!(seen.insert(s));
        }
    }

    #[test]
    fn json_round_trip() {
        let code = rotated_surface_code(5).unwrap();
        for st in [Strategy::Identity, Strategy::RowPartitionRepetition, Strategy::DisjointPartitionBch] {
            let s = build_schedule(&code, st, 3).unwrap();
            let json = s.to_json().unwrap();
            for key in ["\"code\"", "\"strategy\"", "\"rounds\"", "\"x_rows\"", "\"z_rows\"", "\"provenance\""] {
                assert!(json.contains(key));
            }
            let back = MeasurementSchedule::from_json(&json).unwrap();
            assert_eq!(back, s);
            back.verify_against(&code).unwrap();
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for st in Strategy::ALL {
            assert_eq!(st.as_str().parse::<Strategy>().unwrap(), st);
        }
        assert!("nope".parse::<Strategy>().is_err());
    }
}
