//! Boundary surfaces of a voxel solid.
//!
//! The boundary of the solid (the union of closed foreground cubes) is the
//! set of unit squares separating a foreground voxel from a background one.
//! These quads meet along lattice edges and at lattice points. On a valid
//! digital manifold every edge carries exactly two quads and the quads around
//! every lattice point form one cycle of 3, 4, 5 or 6 faces; that count is
//! the point's type.
//!
//! Everything local is read off the 2×2×2 block of voxels around a lattice
//! point. [`corner_table`] enumerates all 256 such blocks once.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::bits::BitSet;
use crate::volume::{ComponentLabeling, VoxelCoord, VoxelVolume};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub const fn from_index(i: usize) -> Axis {
        match i {
            0 => Axis::X,
            1 => Axis::Y,
            _ => Axis::Z,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Outward normal of a boundary face, pointing from the foreground voxel
/// toward the background.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Direction {
    #[serde(rename = "+x")]
    PosX,
    #[serde(rename = "-x")]
    NegX,
    #[serde(rename = "+y")]
    PosY,
    #[serde(rename = "-y")]
    NegY,
    #[serde(rename = "+z")]
    PosZ,
    #[serde(rename = "-z")]
    NegZ,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::PosX,
        Direction::NegX,
        Direction::PosY,
        Direction::NegY,
        Direction::PosZ,
        Direction::NegZ,
    ];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub const fn from_index(i: usize) -> Direction {
        Self::ALL[i]
    }

    #[inline]
    pub const fn along(axis: Axis, positive: bool) -> Direction {
        Self::ALL[axis.index() * 2 + if positive { 0 } else { 1 }]
    }

    #[inline]
    pub const fn axis(self) -> Axis {
        Axis::from_index(self.index() / 2)
    }

    #[inline]
    pub const fn is_positive(self) -> bool {
        self.index() % 2 == 0
    }

    #[inline]
    pub const fn opposite(self) -> Direction {
        Self::ALL[self.index() ^ 1]
    }

    #[inline]
    pub fn offset(self) -> [i64; 3] {
        let mut o = [0; 3];
        o[self.axis().index()] = if self.is_positive() { 1 } else { -1 };
        o
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_positive() { '+' } else { '-' };
        write!(f, "{sign}{}", self.axis())
    }
}

/// Grid corner; coordinates range over `0..=n` per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "[usize; 3]")]
pub struct LatticePoint {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl LatticePoint {
    pub const fn new(x: usize, y: usize, z: usize) -> Self {
        Self { x, y, z }
    }

    pub const fn to_array(self) -> [usize; 3] {
        [self.x, self.y, self.z]
    }

    fn from_array([x, y, z]: [usize; 3]) -> Self {
        Self { x, y, z }
    }
}

impl From<LatticePoint> for [usize; 3] {
    fn from(p: LatticePoint) -> Self {
        p.to_array()
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Unit lattice segment from `start` to `start + e_axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LatticeEdge {
    pub start: LatticePoint,
    pub axis: Axis,
}

impl fmt::Display for LatticeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut end = self.start.to_array();
        end[self.axis.index()] += 1;
        write!(f, "{}-{}", self.start, LatticePoint::from_array(end))
    }
}

/// Unit square between the foreground voxel `cell` and its background
/// neighbor in `direction`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SurfaceFace {
    pub cell: VoxelCoord,
    pub direction: Direction,
}

impl SurfaceFace {
    /// The two in-plane axes, in increasing order.
    fn tangent_axes(self) -> (usize, usize) {
        match self.direction.axis() {
            Axis::X => (1, 2),
            Axis::Y => (0, 2),
            Axis::Z => (0, 1),
        }
    }

    /// Coordinate of the face's plane along its normal axis.
    fn plane(self) -> usize {
        let a = self.direction.axis().index();
        self.cell.to_array()[a] + usize::from(self.direction.is_positive())
    }

    pub fn corners(self) -> [LatticePoint; 4] {
        let (b, e) = self.tangent_axes();
        let mut base = self.cell.to_array();
        base[self.direction.axis().index()] = self.plane();
        let mut out = [LatticePoint::new(0, 0, 0); 4];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut p = base;
            p[b] += k & 1;
            p[e] += k >> 1;
            *slot = LatticePoint::from_array(p);
        }
        out
    }

    /// The four bounding edges, each paired with the in-plane direction
    /// that points from the face's interior across that edge.
    pub fn edges(self) -> [(LatticeEdge, Direction); 4] {
        let (b, e) = self.tangent_axes();
        let mut base = self.cell.to_array();
        base[self.direction.axis().index()] = self.plane();
        let (axis_b, axis_e) = (Axis::from_index(b), Axis::from_index(e));
        let shifted = |axis: usize| {
            let mut p = base;
            p[axis] += 1;
            LatticePoint::from_array(p)
        };
        let origin = LatticePoint::from_array(base);
        [
            (LatticeEdge { start: origin, axis: axis_b }, Direction::along(axis_e, false)),
            (LatticeEdge { start: shifted(e), axis: axis_b }, Direction::along(axis_e, true)),
            (LatticeEdge { start: origin, axis: axis_e }, Direction::along(axis_b, false)),
            (LatticeEdge { start: shifted(b), axis: axis_e }, Direction::along(axis_b, true)),
        ]
    }
}

/// A boundary lattice point together with its number of incident faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SurfaceVertex {
    pub corner: LatticePoint,
    pub incident_faces: u8,
}

/// One edge-connected closed component of the boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySurface {
    pub id: usize,
    /// Foreground component whose voxels carry this surface's faces.
    pub owner_component: u32,
    pub faces: Vec<SurfaceFace>,
    pub vertices: Vec<SurfaceVertex>,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
}

impl BoundarySurface {
    /// `V - E + F` of the quad complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count as i64 + self.face_count as i64
    }

    pub fn vertex_incidence(&self) -> BTreeMap<LatticePoint, u8> {
        vertex_incidence(self)
    }
}

/// Face count at every vertex of `s`.
pub fn vertex_incidence(s: &BoundarySurface) -> BTreeMap<LatticePoint, u8> {
    s.vertices
        .iter()
        .map(|v| (v.corner, v.incident_faces))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// A lattice edge shared by four boundary faces (two voxels meeting
    /// only along that edge).
    NonmanifoldEdge,
    /// Boundary faces around a lattice point form more than one cycle.
    NonmanifoldVertex,
    /// A single-cycle vertex whose face count lies outside 3..=6.
    BadIncidence,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::NonmanifoldEdge => "nonmanifold_edge",
            ViolationKind::NonmanifoldVertex => "nonmanifold_vertex",
            ViolationKind::BadIncidence => "bad_incidence",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationLocation {
    Edge(LatticeEdge),
    Point(LatticePoint),
}

impl fmt::Display for ViolationLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationLocation::Edge(e) => write!(f, "edge {e}"),
            ViolationLocation::Point(p) => write!(f, "point {p}"),
        }
    }
}

/// A place where the boundary fails to be a closed 2-manifold.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, thiserror::Error)]
#[error("{kind} at {location}: {detail}")]
pub struct ManifoldViolation {
    pub kind: ViolationKind,
    pub location: ViolationLocation,
    pub detail: String,
}

// ---------------------------------------------------------------------------
// Corner configurations
//
// Bit `bx | by << 1 | bz << 2` of a configuration is the occupancy of the
// voxel at `p - 1 + (bx, by, bz)` around lattice point `p`. Half-edge
// `2 * axis + s` is the lattice edge leaving `p` along `axis`, toward
// negative (s = 0) or positive (s = 1) coordinates; the four voxels around
// it are those whose bit for `axis` equals `s`.

/// Local boundary structure at a lattice point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CornerInfo {
    /// Boundary faces incident to the point.
    pub incidence: u8,
    /// Face-cycles around the point (faces linked through edges that carry
    /// exactly two faces).
    pub fans: u8,
    /// Bitmask of half-edges carrying four faces.
    pub bad_half_edges: u8,
}

impl CornerInfo {
    #[inline]
    pub fn is_manifold(self) -> bool {
        self.bad_half_edges == 0 && self.fans <= 1 && (self.incidence == 0 || (3..=6).contains(&self.incidence))
    }
}

fn corner_info(config: u8) -> CornerInfo {
    let occ = |b: usize| (config >> b) & 1 == 1;
    // The 12 squares at the point: voxel pair (u, u | 1 << a) with bit a clear in u.
    let mut squares = Vec::with_capacity(12);
    for a in 0..3 {
        for u in 0..8usize {
            if u & (1 << a) == 0 && occ(u) != occ(u | (1 << a)) {
                squares.push((a, u));
            }
        }
    }
    let touches = |&(a, u): &(usize, usize), half_edge: usize| {
        let (axis, side) = (half_edge / 2, half_edge % 2);
        axis != a && (u >> axis) & 1 == side
    };

    let mut parent: Vec<usize> = (0..squares.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut bad = 0u8;
    for h in 0..6 {
        let at: Vec<usize> = (0..squares.len()).filter(|&k| touches(&squares[k], h)).collect();
        match at.len() {
            0 => {}
            2 => {
                let (r0, r1) = (find(&mut parent, at[0]), find(&mut parent, at[1]));
                parent[r0] = r1;
            }
            _ => bad |= 1 << h,
        }
    }
    let fans = (0..squares.len()).filter(|&k| find(&mut parent, k) == k).count();
    CornerInfo {
        incidence: squares.len() as u8,
        fans: fans as u8,
        bad_half_edges: bad,
    }
}

/// Local boundary structure for each of the 256 corner configurations.
pub fn corner_table() -> &'static [CornerInfo; 256] {
    static TABLE: OnceLock<[CornerInfo; 256]> = OnceLock::new();
    TABLE.get_or_init(|| std::array::from_fn(|c| corner_info(c as u8)))
}

/// Configuration byte of the eight voxels around lattice point `p`.
#[inline]
pub fn corner_config(v: &VoxelVolume, p: LatticePoint) -> u8 {
    let (x, y, z) = (p.x as i64, p.y as i64, p.z as i64);
    let mut config = 0u8;
    for b in 0..8 {
        let (bx, by, bz) = ((b & 1) as i64, ((b >> 1) & 1) as i64, (b >> 2) as i64);
        if v.is_foreground(x - 1 + bx, y - 1 + by, z - 1 + bz) {
            config |= 1 << b;
        }
    }
    config
}

fn half_edge(p: LatticePoint, h: usize) -> LatticeEdge {
    let axis = Axis::from_index(h / 2);
    let mut start = p.to_array();
    if h % 2 == 0 {
        start[axis.index()] -= 1;
    }
    LatticeEdge {
        start: LatticePoint::from_array(start),
        axis,
    }
}

fn edge_violation(edge: LatticeEdge) -> ManifoldViolation {
    ManifoldViolation {
        kind: ViolationKind::NonmanifoldEdge,
        location: ViolationLocation::Edge(edge),
        detail: "edge bounds 4 boundary faces (voxels meet only along this edge)".into(),
    }
}

/// Reports the first defect at `p`, if any. Vertex-level checks only apply
/// when every incident edge is manifold, so a bad edge is reported once,
/// as an edge.
fn corner_violation(p: LatticePoint, info: CornerInfo) -> Option<ManifoldViolation> {
    if info.bad_half_edges != 0 {
        let h = info.bad_half_edges.trailing_zeros() as usize;
        return Some(edge_violation(half_edge(p, h)));
    }
    if info.fans > 1 {
        return Some(ManifoldViolation {
            kind: ViolationKind::NonmanifoldVertex,
            location: ViolationLocation::Point(p),
            detail: format!(
                "{} boundary faces form {} separate cycles around this point",
                info.incidence, info.fans
            ),
        });
    }
    if info.incidence != 0 && !(3..=6).contains(&info.incidence) {
        return Some(ManifoldViolation {
            kind: ViolationKind::BadIncidence,
            location: ViolationLocation::Point(p),
            detail: format!("{} incident boundary faces, expected 3..=6", info.incidence),
        });
    }
    None
}

/// Lists every local manifold defect of the boundary, in lattice scan order
/// (z slowest). An empty list means the boundary is a disjoint union of
/// closed surfaces.
pub fn validate_manifold(v: &VoxelVolume) -> Vec<ManifoldViolation> {
    let table = corner_table();
    let [nx, ny, nz] = v.dims();
    let mut out = Vec::new();
    for z in 0..=nz {
        for y in 0..=ny {
            for x in 0..=nx {
                let p = LatticePoint::new(x, y, z);
                let config = corner_config(v, p);
                if config == 0 || config == 0xff {
                    continue;
                }
                let info = table[config as usize];
                // Each bad edge is seen from both endpoints; report it from its start.
                for a in 0..3 {
                    if info.bad_half_edges & (1 << (2 * a + 1)) != 0 {
                        out.push(edge_violation(half_edge(p, 2 * a + 1)));
                    }
                }
                if info.bad_half_edges == 0 {
                    out.extend(corner_violation(p, info));
                }
            }
        }
    }
    out
}

struct LatticeIndex {
    sx: usize,
    sy: usize,
    len: usize,
}

impl LatticeIndex {
    fn new(v: &VoxelVolume) -> Self {
        let [nx, ny, nz] = v.dims();
        Self {
            sx: nx + 1,
            sy: ny + 1,
            len: (nx + 1) * (ny + 1) * (nz + 1),
        }
    }

    #[inline]
    fn point(&self, p: LatticePoint) -> usize {
        p.x + self.sx * (p.y + self.sy * p.z)
    }

    #[inline]
    fn edge(&self, e: LatticeEdge) -> usize {
        self.point(e.start) * 3 + e.axis.index()
    }
}

#[inline]
fn face_id(v: &VoxelVolume, f: SurfaceFace) -> usize {
    v.index_of(f.cell) * 6 + f.direction.index()
}

fn step(c: VoxelCoord, d: Direction) -> [i64; 3] {
    let o = d.offset();
    [c.x as i64 + o[0], c.y as i64 + o[1], c.z as i64 + o[2]]
}

fn fg(v: &VoxelVolume, p: [i64; 3]) -> bool {
    v.is_foreground(p[0], p[1], p[2])
}

fn coord(p: [i64; 3]) -> VoxelCoord {
    VoxelCoord::new(p[0] as usize, p[1] as usize, p[2] as usize)
}

/// The other boundary face at `edge` of face `f`; `across` points from `f`
/// over the edge.
fn face_across(
    v: &VoxelVolume,
    f: SurfaceFace,
    edge: LatticeEdge,
    across: Direction,
) -> Result<SurfaceFace, ManifoldViolation> {
    // Around the edge, in cyclic order: c, c+n (background), c+n+t, c+t.
    let side = step(f.cell, across);
    let o = f.direction.offset();
    let diagonal = [side[0] + o[0], side[1] + o[1], side[2] + o[2]];
    match (fg(v, side), fg(v, diagonal)) {
        (true, true) => Ok(SurfaceFace {
            cell: coord(diagonal),
            direction: across.opposite(),
        }),
        (true, false) => Ok(SurfaceFace {
            cell: coord(side),
            direction: f.direction,
        }),
        (false, false) => Ok(SurfaceFace {
            cell: f.cell,
            direction: across,
        }),
        (false, true) => Err(edge_violation(edge)),
    }
}

/// Splits the boundary into edge-connected closed surfaces.
///
/// Surfaces are numbered in order of their first face in voxel scan order,
/// so an object's outer surface precedes the surfaces of its cavities.
/// Fails on the first non-manifold edge or vertex encountered.
pub fn extract_boundary(
    v: &VoxelVolume,
    labeling: &ComponentLabeling,
) -> Result<Vec<BoundarySurface>, ManifoldViolation> {
    let table = corner_table();
    let lattice = LatticeIndex::new(v);
    let mut face_seen = BitSet::new(v.cell_count() * 6);
    let mut vertex_seen = BitSet::new(lattice.len);
    let mut edge_seen = BitSet::new(lattice.len * 3);
    let mut surfaces = Vec::new();
    let mut stack = Vec::new();

    for cell in v.foreground() {
        for direction in Direction::ALL {
            if fg(v, step(cell, direction)) {
                continue;
            }
            let seed = SurfaceFace { cell, direction };
            if !face_seen.insert(face_id(v, seed)) {
                continue;
            }
            let owner = labeling
                .label_of(v, cell)
                .expect("labeling covers every foreground voxel");
            let mut surface = BoundarySurface {
                id: surfaces.len(),
                owner_component: owner,
                faces: Vec::new(),
                vertices: Vec::new(),
                vertex_count: 0,
                edge_count: 0,
                face_count: 0,
            };
            stack.push(seed);
            while let Some(f) = stack.pop() {
                surface.faces.push(f);
                for p in f.corners() {
                    if vertex_seen.insert(lattice.point(p)) {
                        let info = table[corner_config(v, p) as usize];
                        if let Some(violation) = corner_violation(p, info) {
                            return Err(violation);
                        }
                        surface.vertices.push(SurfaceVertex {
                            corner: p,
                            incident_faces: info.incidence,
                        });
                    }
                }
                for (edge, across) in f.edges() {
                    if edge_seen.insert(lattice.edge(edge)) {
                        surface.edge_count += 1;
                    }
                    let next = face_across(v, f, edge, across)?;
                    if face_seen.insert(face_id(v, next)) {
                        stack.push(next);
                    }
                }
            }
            surface.face_count = surface.faces.len();
            surface.vertex_count = surface.vertices.len();
            surfaces.push(surface);
        }
    }
    Ok(surfaces)
}
