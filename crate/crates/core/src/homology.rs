//! Homology of voxel solids from the genera of their boundary surfaces.
//!
//! For a compact connected 3-manifold `M ⊂ R³` whose boundary consists of
//! closed surfaces `S_1 … S_n` of genus `g_i`, Alexander duality gives
//!
//! * `H_0(M) = Z`
//! * `H_1(M) = Z^(g_1 + … + g_n)`, torsion-free, half the rank of `H_1(∂M)`
//! * `H_2(M) = Z^(n − 1)`
//! * `H_3(M) = 0`
//!
//! and the Euler characteristics satisfy `χ(M) = χ(∂M) / 2`.
//!
//! [`assemble_report`] runs the whole pipeline: label components, track the
//! boundary, classify surface points and compute genera, then apply the
//! formulas above per component. A disconnected object gets the direct sum.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::boundary::{extract_boundary, validate_manifold, BoundarySurface, ManifoldViolation};
use crate::invariants::{classify, gauss_bonnet_check, genus, InvariantError, SurfaceClassification};
use crate::volume::{foreground_components, VoxelVolume};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("input is not a digital 3-manifold ({} violation(s))", .0.len())]
    NotManifold(Vec<ManifoldViolation>),
    #[error("boundary tracking: {0}")]
    Boundary(#[from] ManifoldViolation),
    #[error("genus of surface {surface}: {source}")]
    Invariant {
        surface: usize,
        source: InvariantError,
    },
    #[error("genus of surface {surface}: Gauss-Bonnet check fails for genus {genus}")]
    GaussBonnet { surface: usize, genus: u32 },
    #[error("homology of component {component}: {source}")]
    Homology {
        component: usize,
        source: HomologyError,
    },
    #[error("homology of component {component}: χ(M) = {euler_solid} but χ(∂M)/2 = {half_boundary}")]
    EulerMismatch {
        component: usize,
        euler_solid: i64,
        half_boundary: i64,
    },
}

impl AnalysisError {
    /// Pipeline stage at which the analysis stopped.
    pub fn stage(&self) -> &'static str {
        match self {
            AnalysisError::NotManifold(_) => "validation",
            AnalysisError::Boundary(_) => "boundary",
            AnalysisError::Invariant { .. } | AnalysisError::GaussBonnet { .. } => "genus",
            AnalysisError::Homology { .. } | AnalysisError::EulerMismatch { .. } => "homology",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HomologyError {
    #[error("a solid in R³ has at least one boundary surface")]
    NoBoundary,
}

/// Betti numbers of a solid; all groups are free abelian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct HomologyGroups {
    pub b0: u64,
    pub b1: u64,
    pub b2: u64,
    pub b3: u64,
}

/// `"0"`, `"Z"` or `"Z^k"`.
pub fn free_group(rank: u64) -> String {
    match rank {
        0 => "0".to_string(),
        1 => "Z".to_string(),
        k => format!("Z^{k}"),
    }
}

impl HomologyGroups {
    pub fn betti(&self) -> [u64; 4] {
        [self.b0, self.b1, self.b2, self.b3]
    }

    pub fn presentation(&self) -> [String; 4] {
        self.betti().map(free_group)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.b0 as i64 - self.b1 as i64 + self.b2 as i64 - self.b3 as i64
    }
}

impl std::ops::Add for HomologyGroups {
    type Output = HomologyGroups;

    fn add(self, o: HomologyGroups) -> HomologyGroups {
        HomologyGroups {
            b0: self.b0 + o.b0,
            b1: self.b1 + o.b1,
            b2: self.b2 + o.b2,
            b3: self.b3 + o.b3,
        }
    }
}

impl std::iter::Sum for HomologyGroups {
    fn sum<I: Iterator<Item = HomologyGroups>>(iter: I) -> Self {
        iter.fold(HomologyGroups::default(), |a, b| a + b)
    }
}

/// Homology of a connected solid whose boundary surfaces have the given genera.
pub fn component_homology(genera: &[u32]) -> Result<HomologyGroups, HomologyError> {
    if genera.is_empty() {
        return Err(HomologyError::NoBoundary);
    }
    Ok(HomologyGroups {
        b0: 1,
        b1: genera.iter().map(|&g| u64::from(g)).sum(),
        b2: genera.len() as u64 - 1,
        b3: 0,
    })
}

/// `χ(∂M)` for boundary surfaces of the given genera.
pub fn boundary_euler(genera: &[u32]) -> i64 {
    genera.iter().map(|&g| 2 - 2 * i64::from(g)).sum()
}

/// Checks `b0 − b1 + b2 − b3 = ½ Σ (2 − 2g_i)` exactly.
pub fn euler_consistency(genera: &[u32], h: &HomologyGroups) -> bool {
    2 * h.euler_characteristic() == boundary_euler(genera)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSummary {
    pub id: usize,
    pub genus: u32,
    pub classification: SurfaceClassification,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

impl SurfaceSummary {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub component_id: usize,
    pub voxel_count: usize,
    /// Boundary surfaces in discovery order; the outer surface comes first.
    pub surfaces: Vec<SurfaceSummary>,
    pub homology: HomologyGroups,
    pub euler_solid: i64,
    pub euler_boundary: i64,
}

impl ComponentReport {
    pub fn boundary_surface_count(&self) -> usize {
        self.surfaces.len()
    }

    pub fn genera(&self) -> Vec<u32> {
        self.surfaces.iter().map(|s| s.genus).collect()
    }

    /// Rank of `H_1(∂M)`, `Σ 2g_i`.
    pub fn b1_boundary(&self) -> u64 {
        self.surfaces.iter().map(|s| 2 * u64::from(s.genus)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyReport {
    pub component_count: usize,
    pub per_component: Vec<ComponentReport>,
    pub total: HomologyGroups,
}

impl TopologyReport {
    pub fn genera(&self) -> Vec<Vec<u32>> {
        self.per_component.iter().map(|c| c.genera()).collect()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &SurfaceSummary> {
        self.per_component.iter().flat_map(|c| c.surfaces.iter())
    }

    pub fn euler_solid(&self) -> i64 {
        self.per_component.iter().map(|c| c.euler_solid).sum()
    }

    pub fn euler_boundary(&self) -> i64 {
        self.per_component.iter().map(|c| c.euler_boundary).sum()
    }

    /// JSON rendering. Keys are stable; see the README for the schema.
    pub fn to_json(&self) -> Value {
        let components: Vec<Value> = self
            .per_component
            .iter()
            .map(|c| {
                let surfaces: Vec<Value> = c
                    .surfaces
                    .iter()
                    .map(|s| {
                        json!({
                            "id": s.id,
                            "genus": s.genus,
                            "m3": s.classification.m3,
                            "m4": s.classification.m4,
                            "m5": s.classification.m5,
                            "m6": s.classification.m6,
                            "vertices": s.vertices,
                            "edges": s.edges,
                            "faces": s.faces,
                        })
                    })
                    .collect();
                json!({
                    "id": c.component_id,
                    "voxels": c.voxel_count,
                    "boundary_surfaces": c.boundary_surface_count(),
                    "genera": c.genera(),
                    "b1_boundary": c.b1_boundary(),
                    "betti": c.homology.betti(),
                    "homology": c.homology.presentation(),
                    "euler_solid": c.euler_solid,
                    "euler_boundary": c.euler_boundary,
                    "surfaces": surfaces,
                })
            })
            .collect();
        json!({
            "component_count": self.component_count,
            "genera": self.genera(),
            "betti": self.total.betti(),
            "homology": self.total.presentation(),
            "euler_solid": self.euler_solid(),
            "euler_boundary": self.euler_boundary(),
            "components": components,
        })
    }

    pub fn to_text(&self, per_component: bool) -> String {
        let mut out = String::new();
        let h = self.total.presentation();
        let _ = writeln!(out, "components: {}", self.component_count);
        for (i, g) in h.iter().enumerate() {
            let _ = writeln!(out, "H{i} = {g}");
        }
        let b = self.total.betti();
        let _ = writeln!(out, "betti: {} {} {} {}", b[0], b[1], b[2], b[3]);
        let _ = writeln!(out, "euler: solid {} boundary {}", self.euler_solid(), self.euler_boundary());
        if per_component {
            for c in &self.per_component {
                let h = c.homology.presentation();
                let _ = writeln!(
                    out,
                    "component {}: {} voxels, {} boundary surface(s), genera {:?}, H = ({}, {}, {}, {})",
                    c.component_id,
                    c.voxel_count,
                    c.boundary_surface_count(),
                    c.genera(),
                    h[0],
                    h[1],
                    h[2],
                    h[3]
                );
                for s in &c.surfaces {
                    let k = s.classification;
                    let _ = writeln!(
                        out,
                        "  surface {}: genus {}, M3 {} M4 {} M5 {} M6 {}, V {} E {} F {}",
                        s.id, s.genus, k.m3, k.m4, k.m5, k.m6, s.vertices, s.edges, s.faces
                    );
                }
            }
        }
        out
    }
}

fn summarize(s: &BoundarySurface) -> Result<SurfaceSummary, AnalysisError> {
    let wrap = |source| AnalysisError::Invariant {
        surface: s.id,
        source,
    };
    let classification = classify(s).map_err(wrap)?;
    let g = genus(&classification).map_err(wrap)?;
    if !gauss_bonnet_check(s, g) {
        return Err(AnalysisError::GaussBonnet { surface: s.id, genus: g });
    }
    Ok(SurfaceSummary {
        id: s.id,
        genus: g,
        classification,
        vertices: s.vertex_count,
        edges: s.edge_count,
        faces: s.face_count,
    })
}

/// Computes genus and homology for every component of `v`.
pub fn assemble_report(v: &VoxelVolume) -> Result<TopologyReport, AnalysisError> {
    let violations = validate_manifold(v);
    if !violations.is_empty() {
        return Err(AnalysisError::NotManifold(violations));
    }
    let labeling = foreground_components(v);
    let surfaces = extract_boundary(v, &labeling)?;

    let mut per_component: Vec<ComponentReport> = labeling
        .sizes()
        .iter()
        .enumerate()
        .map(|(id, &size)| ComponentReport {
            component_id: id,
            voxel_count: size,
            surfaces: Vec::new(),
            homology: HomologyGroups::default(),
            euler_solid: 0,
            euler_boundary: 0,
        })
        .collect();
    for s in &surfaces {
        let summary = summarize(s)?;
        per_component[s.owner_component as usize].surfaces.push(summary);
    }
    for c in &mut per_component {
        let genera = c.genera();
        c.homology = component_homology(&genera).map_err(|source| AnalysisError::Homology {
            component: c.component_id,
            source,
        })?;
        c.euler_solid = c.homology.euler_characteristic();
        c.euler_boundary = boundary_euler(&genera);
        if !euler_consistency(&genera, &c.homology) {
            return Err(AnalysisError::EulerMismatch {
                component: c.component_id,
                euler_solid: c.euler_solid,
                half_boundary: c.euler_boundary / 2,
            });
        }
    }
    let total = per_component.iter().map(|c| c.homology).sum();
    Ok(TopologyReport {
        component_count: per_component.len(),
        per_component,
        total,
    })
}
