//! CSS stabilizer codes and their logical operators.
//!
//! Errors are tracked in a single Z frame: Z errors are detected by `Hx`
//! and a residual flips the logical qubit when it overlaps `logical_x`
//! an odd number of times.

mod concat;
mod surface;
mod tetra;
mod weight;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{for_each_combination, binomial, BitMatrix, BitVec, RowSpace};

pub use concat::{concatenate, steane_code, DEFAULT_QUBIT_CAP};
pub use surface::{rotated_surface_code, Corner, SurfaceLayout};
pub use tetra::{tetrahedral_cells, tetrahedral_code, tetrahedral_faces};
pub use weight::{max_syndrome_weight, max_syndrome_weight_budgeted, WeightMode, EXACT_WEIGHT_BUDGET};

/// Where a code came from; strategies that exploit geometry or levels
/// dispatch on this.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CodeKind {
    Surface { d: usize },
    Tetrahedral,
    Steane,
    Concatenated { base: String, levels: usize },
    Custom,
}

impl CodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            CodeKind::Surface { .. } => "surface",
            CodeKind::Tetrahedral => "tetrahedral",
            CodeKind::Steane => "steane",
            CodeKind::Concatenated { .. } => "concat",
            CodeKind::Custom => "custom",
        }
    }
}

/// A CSS code with one logical qubit tracked by a representative pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    n: usize,
    k: usize,
    d: usize,
    hx: BitMatrix,
    hz: BitMatrix,
    logical_z: BitVec,
    logical_x: BitVec,
    kind: CodeKind,
    x_levels: Vec<usize>,
    z_levels: Vec<usize>,
}

/// Representatives returned by [`logical_representatives`]. `minimal` is
/// false when the weight search ran out of budget and a nullspace vector
/// was used instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalPair {
    pub logical_z: BitVec,
    pub logical_x: BitVec,
    pub minimal: bool,
}

/// Combination count the logical-operator search may enumerate per side.
pub const LOGICAL_SEARCH_BUDGET: u64 = 20_000_000;

impl CssCode {
    /// Build from check matrices, searching for logical representatives.
    pub fn new(hx: BitMatrix, hz: BitMatrix, d: usize, kind: CodeKind) -> Result<Self> {
        check_commutation(&hx, &hz)?;
        let pair = logical_representatives(&hx, &hz, LOGICAL_SEARCH_BUDGET)?;
        Self::with_logicals(hx, hz, d, kind, pair.logical_z, pair.logical_x)
    }

    /// Build with explicit logical representatives, validated.
    pub fn with_logicals(
        hx: BitMatrix,
        hz: BitMatrix,
        d: usize,
        kind: CodeKind,
        logical_z: BitVec,
        logical_x: BitVec,
    ) -> Result<Self> {
        check_commutation(&hx, &hz)?;
        let n = hx.cols();
        let k = n - hx.rank() - hz.rank();
        let code = Self {
            n,
            k,
            d,
            x_levels: vec![0; hx.rows()],
            z_levels: vec![0; hz.rows()],
            hx,
            hz,
            logical_z,
            logical_x,
            kind,
        };
        code.validate()?;
        Ok(code)
    }

    pub(crate) fn with_levels(mut self, x_levels: Vec<usize>, z_levels: Vec<usize>) -> Self {
        assert_eq!(x_levels.len(), self.hx.rows());
        assert_eq!(z_levels.len(), self.hz.rows());
        self.x_levels = x_levels;
        self.z_levels = z_levels;
        self
    }

    /// Check every structural invariant of the code.
    pub fn validate(&self) -> Result<()> {
        check_commutation(&self.hx, &self.hz)?;
        if self.k != 1 {
            return Err(Error::InvalidParameter(format!(
                "expected one logical qubit, found k={}",
                self.k
            )));
        }
        let lz = &self.logical_z;
        let lx = &self.logical_x;
        if lz.len() != self.n || lx.len() != self.n {
            return Err(Error::InvalidParameter("logical length differs from n".into()));
        }
        if !self.hx.mul_vec(lz).is_zero() || !self.hz.mul_vec(lx).is_zero() {
            return Err(Error::InvalidParameter("logical does not commute with checks".into()));
        }
        if !lz.dot(lx) {
            return Err(Error::InvalidParameter("logical pair does not anticommute".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    pub fn logical_z(&self) -> &BitVec {
        &self.logical_z
    }

    pub fn logical_x(&self) -> &BitVec {
        &self.logical_x
    }

    pub fn kind(&self) -> &CodeKind {
        &self.kind
    }

    /// Concatenation level of each X check, 0 for the innermost.
    pub fn x_levels(&self) -> &[usize] {
        &self.x_levels
    }

    pub fn z_levels(&self) -> &[usize] {
        &self.z_levels
    }

    pub fn checks(&self, side: Side) -> &BitMatrix {
        match side {
            Side::X => &self.hx,
            Side::Z => &self.hz,
        }
    }

    pub fn levels(&self, side: Side) -> &[usize] {
        match side {
            Side::X => &self.x_levels,
            Side::Z => &self.z_levels,
        }
    }

    /// Logical flip caused by a Z-type data residual.
    pub fn logical_flip(&self, residual: &BitVec) -> bool {
        residual.dot(&self.logical_x)
    }

    /// Header `n k d`, then `Hx` and `Hz` blocks.
    pub fn to_text(&self) -> String {
        format!(
            "{} {} {}\n{}{}",
            self.n,
            self.k,
            self.d,
            self.hx.to_text(),
            self.hz.to_text()
        )
    }
}

/// The two check types of a CSS code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Z,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::X => "x",
            Side::Z => "z",
        })
    }
}

impl FromStr for CssCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty code file".into()))?;
        let nums: Vec<usize> = header
            .split(' ')
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad code header {header:?}"))))
            .collect::<Result<_>>()?;
        let [n, k, d] = nums[..] else {
            return Err(Error::Parse(format!("bad code header {header:?}")));
        };
        let hx = BitMatrix::parse_lines(&mut lines)?;
        let hz = BitMatrix::parse_lines(&mut lines)?;
        if lines.any(|l| !l.is_empty()) {
            return Err(Error::Parse("trailing content after Hz".into()));
        }
        if hx.cols() != n || hz.cols() != n {
            return Err(Error::Parse("matrix width differs from n".into()));
        }
        let code = CssCode::new(hx, hz, d, CodeKind::Custom)?;
        if code.k != k {
            return Err(Error::Parse(format!("header says k={k}, checks give k={}", code.k)));
        }
        Ok(code)
    }
}

fn check_commutation(hx: &BitMatrix, hz: &BitMatrix) -> Result<()> {
    if hx.cols() != hz.cols() {
        return Err(Error::DimensionMismatch {
            op: "css",
            left: hx.shape(),
            right: hz.shape(),
        });
    }
    if !hx.matmul(&hz.transpose())?.is_zero() {
        return Err(Error::InvalidParameter("Hx and Hz do not commute".into()));
    }
    Ok(())
}

/// Minimum-weight logical representatives of a `k = 1` CSS code.
///
/// `logical_z` is searched among vectors annihilated by `Hx` and outside the
/// row space of `Hz`, in increasing weight and lexicographic order;
/// `logical_x` symmetrically. If a side would enumerate more than `budget`
/// candidates, the first suitable nullspace basis vector is returned and
/// `minimal` is cleared.
pub fn logical_representatives(hx: &BitMatrix, hz: &BitMatrix, budget: u64) -> Result<LogicalPair> {
    check_commutation(hx, hz)?;
    let n = hx.cols();
    let k = n - hx.rank() - hz.rank();
    if k != 1 {
        return Err(Error::InvalidParameter(format!(
            "logical search needs k=1, found k={k}"
        )));
    }
    let (logical_z, min_z) = search_logical(hx, hz, budget);
    let (logical_x, min_x) = search_logical(hz, hx, budget);
    Ok(LogicalPair {
        logical_z,
        logical_x,
        minimal: min_z && min_x,
    })
}

fn search_logical(commute: &BitMatrix, stabilizers: &BitMatrix, budget: u64) -> (BitVec, bool) {
    let n = commute.cols();
    let stab = RowSpace::new(stabilizers);
    let cols: Vec<BitVec> = (0..n).map(|j| commute.column(j)).collect();
    let mut spent = 0u64;
    for w in 1..=n {
        spent = spent.saturating_add(binomial(n, w));
        if spent > budget {
            break;
        }
        let mut found = None;
        let mut acc = BitVec::zeros(commute.rows());
        for_each_combination(n, w, |idx| {
            acc.clear();
            for &j in idx {
                acc.xor_assign(&cols[j]);
            }
            if acc.is_zero() {
                let v = BitVec::from_indices(n, idx.iter().copied());
                if !stab.contains(&v) {
                    found = Some(v);
                    return false;
                }
            }
            true
        });
        if let Some(v) = found {
            return (v, true);
        }
    }
    let null = commute.nullspace_basis();
    let v = (0..null.rows())
        .map(|i| null.row(i))
        .find(|v| !stab.contains(v))
        .expect("k = 1 guarantees a logical in the nullspace");
    (v, false)
}
