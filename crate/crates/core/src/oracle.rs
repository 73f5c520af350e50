//! Brute-force Betti numbers of the cubical complex, used to cross-check
//! the genus/duality pipeline.
//!
//! The solid is the union of closed foreground unit cubes. Its Euler
//! characteristic is the alternating count of lattice cells (vertices, edges,
//! squares, cubes) touched by at least one foreground cube. `b0` is the number
//! of 6-connected foreground components, `b2` the number of cavities
//! (bounded 6-connected background components), and `b1 = b0 + b2 − χ`.
//! Nothing here uses surface point types or genera.

use serde::Serialize;

use crate::boundary::ManifoldViolation;
use crate::homology::{assemble_report, AnalysisError};
use crate::volume::{background_components, foreground_components, VoxelVolume};

/// Cells of the closed-cube complex of the foreground.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct CellCounts {
    pub vertices: u64,
    pub edges: u64,
    pub squares: u64,
    pub cubes: u64,
}

impl CellCounts {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.squares as i64 - self.cubes as i64
    }
}

impl std::ops::Add for CellCounts {
    type Output = CellCounts;

    fn add(self, o: CellCounts) -> CellCounts {
        CellCounts {
            vertices: self.vertices + o.vertices,
            edges: self.edges + o.edges,
            squares: self.squares + o.squares,
            cubes: self.cubes + o.cubes,
        }
    }
}

/// Counts every lattice cell incident to at least one foreground cube.
///
/// A lattice cell spans `[p, p + 1]` along the axes in its extent and is the
/// degenerate interval `[p, p]` along the rest; the cubes touching it are
/// those whose index is `p` along extent axes and `p − 1` or `p` elsewhere.
pub fn cell_counts(v: &VoxelVolume) -> CellCounts {
    let [nx, ny, nz] = v.dims();
    let mut counts = CellCounts {
        cubes: v.foreground_count() as u64,
        ..CellCounts::default()
    };
    for z in 0..=nz as i64 {
        for y in 0..=ny as i64 {
            for x in 0..=nx as i64 {
                let touched = |extent: [bool; 3]| {
                    let choices = |along: bool, p: i64| if along { p..=p } else { p - 1..=p };
                    for cz in choices(extent[2], z) {
                        for cy in choices(extent[1], y) {
                            for cx in choices(extent[0], x) {
                                if v.is_foreground(cx, cy, cz) {
                                    return true;
                                }
                            }
                        }
                    }
                    false
                };
                counts.vertices += u64::from(touched([false; 3]));
                for axis in 0..3 {
                    let mut edge = [false; 3];
                    edge[axis] = true;
                    counts.edges += u64::from(touched(edge));
                    let mut square = [true; 3];
                    square[axis] = false;
                    counts.squares += u64::from(touched(square));
                }
            }
        }
    }
    counts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OracleBetti {
    pub b0: i64,
    pub b1: i64,
    pub b2: i64,
    pub euler: i64,
    pub cells: CellCounts,
}

impl OracleBetti {
    pub fn triple(&self) -> [i64; 3] {
        [self.b0, self.b1, self.b2]
    }
}

pub fn oracle_betti(v: &VoxelVolume) -> OracleBetti {
    let cells = cell_counts(v);
    let euler = cells.euler_characteristic();
    let b0 = foreground_components(v).component_count() as i64;
    let b2 = background_components(v).1.component_count() as i64 - 1;
    OracleBetti {
        b0,
        b1: b0 + b2 - euler,
        b2,
        euler,
        cells,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BettiMismatch {
    pub index: usize,
    pub fast: i64,
    pub oracle: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Comparison {
    Agree {
        betti: [i64; 3],
    },
    Disagree {
        fast: [i64; 3],
        oracle: [i64; 3],
        mismatches: Vec<BettiMismatch>,
    },
    /// The fast path refused the input; only the oracle's answer exists.
    Incomparable {
        oracle: [i64; 3],
        reason: String,
        violations: Vec<ManifoldViolation>,
    },
}

impl Comparison {
    pub fn is_agreement(&self) -> bool {
        matches!(self, Comparison::Agree { .. })
    }

    /// Mismatching Betti numbers; empty unless the two routes disagree.
    pub fn diff(&self) -> &[BettiMismatch] {
        match self {
            Comparison::Disagree { mismatches, .. } => mismatches,
            _ => &[],
        }
    }
}

/// Runs both the fast pipeline and the oracle on `v` and compares
/// `(b0, b1, b2)`.
pub fn compare(v: &VoxelVolume) -> Comparison {
    let oracle = oracle_betti(v).triple();
    let report = match assemble_report(v) {
        Ok(r) => r,
        Err(e) => {
            let violations = match &e {
                AnalysisError::NotManifold(list) => list.clone(),
                AnalysisError::Boundary(one) => vec![one.clone()],
                _ => Vec::new(),
            };
            return Comparison::Incomparable {
                oracle,
                reason: e.to_string(),
                violations,
            };
        }
    };
    let t = report.total;
    let fast = [t.b0 as i64, t.b1 as i64, t.b2 as i64];
    let mismatches: Vec<BettiMismatch> = (0..3)
        .filter(|&i| fast[i] != oracle[i])
        .map(|i| BettiMismatch {
            index: i,
            fast: fast[i],
            oracle: oracle[i],
        })
        .collect();
    if mismatches.is_empty() {
        Comparison::Agree { betti: fast }
    } else {
        Comparison::Disagree {
            fast,
            oracle,
            mismatches,
        }
    }
}
