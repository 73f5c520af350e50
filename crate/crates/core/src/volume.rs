//! Dense binary voxel volumes, their file formats, and 6-connected
//! component labeling.
//!
//! A volume stores one bit per cell with linear index
//! `i = x + nx * (y + ny * z)`. Cells outside the grid are background.
//! Voxels are treated as closed unit cubes (raster space): cell `(x, y, z)`
//! occupies `[x, x+1] × [y, y+1] × [z, z+1]`.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::bits::BitSet;

/// Magic bytes opening a binary (`.vox3`) volume file.
pub const BINARY_MAGIC: &[u8; 4] = b"VOX3";
/// Binary format version understood by this crate.
pub const BINARY_VERSION: u8 = 0x01;
/// Header line of a text (`.p3d`) volume file.
pub const TEXT_MAGIC: &str = "P3D";

const BINARY_HEADER_LEN: usize = 4 + 1 + 12;

#[derive(Debug, thiserror::Error)]
pub enum VolumeError {
    #[error("volume dimensions must all be positive, got {0}x{1}x{2}")]
    ZeroDimension(usize, usize, usize),
    #[error("volume dimensions {0}x{1}x{2} are too large")]
    TooLarge(usize, usize, usize),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("voxel ({x}, {y}, {z}) lies outside dims {nx}x{ny}x{nz}")]
    OutOfBounds {
        x: u64,
        y: u64,
        z: u64,
        nx: usize,
        ny: usize,
        nz: usize,
    },
    #[error("truncated bitmap: expected {expected} bytes, found {found}")]
    TruncatedBitmap { expected: usize, found: usize },
    #[error("{0} trailing bytes after bitmap")]
    TrailingBytes(usize),
    #[error("unused bits in the final bitmap byte are set")]
    PaddingBitsSet,
    #[error("unsupported binary format version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("unrecognized volume format")]
    UnknownFormat,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Grid cell index triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(into = "[usize; 3]")]
pub struct VoxelCoord {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl VoxelCoord {
    pub const fn new(x: usize, y: usize, z: usize) -> Self {
        Self { x, y, z }
    }

    pub const fn to_array(self) -> [usize; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[usize; 3]> for VoxelCoord {
    fn from([x, y, z]: [usize; 3]) -> Self {
        Self { x, y, z }
    }
}

impl From<VoxelCoord> for [usize; 3] {
    fn from(c: VoxelCoord) -> Self {
        c.to_array()
    }
}

impl fmt::Display for VoxelCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Dense 3D binary occupancy grid.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VoxelVolume {
    dims: [usize; 3],
    occupancy: BitSet,
    foreground_count: usize,
}

impl fmt::Debug for VoxelVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VoxelVolume")
            .field("dims", &self.dims)
            .field("foreground_count", &self.foreground_count)
            .finish()
    }
}

impl VoxelVolume {
    /// Creates an empty (all background) volume.
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self, VolumeError> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(VolumeError::ZeroDimension(nx, ny, nz));
        }
        let cells = nx
            .checked_mul(ny)
            .and_then(|c| c.checked_mul(nz))
            // lattice-point arrays need (nx+1)(ny+1)(nz+1) * 3 entries
            .filter(|_| {
                (nx + 1)
                    .checked_mul(ny + 1)
                    .and_then(|c| c.checked_mul(nz + 1))
                    .and_then(|c| c.checked_mul(8))
                    .is_some()
            })
            .ok_or(VolumeError::TooLarge(nx, ny, nz))?;
        Ok(Self {
            dims: [nx, ny, nz],
            occupancy: BitSet::new(cells),
            foreground_count: 0,
        })
    }

    /// Creates a volume with the given foreground voxels. Duplicates are
    /// allowed.
    pub fn from_coords<I>(dims: [usize; 3], coords: I) -> Result<Self, VolumeError>
    where
        I: IntoIterator<Item = VoxelCoord>,
    {
        let mut v = Self::new(dims[0], dims[1], dims[2])?;
        for c in coords {
            v.set(c, true)?;
        }
        Ok(v)
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Total number of grid cells, `nx * ny * nz`.
    #[inline]
    pub fn cell_count(&self) -> usize {
        self.occupancy.len()
    }

    #[inline]
    pub fn foreground_count(&self) -> usize {
        self.foreground_count
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.foreground_count == 0
    }

    #[inline]
    pub fn in_bounds(&self, c: VoxelCoord) -> bool {
        c.x < self.dims[0] && c.y < self.dims[1] && c.z < self.dims[2]
    }

    #[inline]
    pub fn index_of(&self, c: VoxelCoord) -> usize {
        debug_assert!(self.in_bounds(c));
        c.x + self.dims[0] * (c.y + self.dims[1] * c.z)
    }

    #[inline]
    pub fn coord_of(&self, i: usize) -> VoxelCoord {
        let [nx, ny, _] = self.dims;
        VoxelCoord {
            x: i % nx,
            y: (i / nx) % ny,
            z: i / (nx * ny),
        }
    }

    /// Occupancy of an in-grid cell; cells outside the grid read as background.
    #[inline]
    pub fn get(&self, c: VoxelCoord) -> bool {
        self.in_bounds(c) && self.occupancy.get(self.index_of(c))
    }

    /// Occupancy at signed coordinates; anything outside the grid is background.
    #[inline]
    pub fn is_foreground(&self, x: i64, y: i64, z: i64) -> bool {
        let [nx, ny, nz] = self.dims;
        if x < 0 || y < 0 || z < 0 {
            return false;
        }
        let (x, y, z) = (x as usize, y as usize, z as usize);
        x < nx && y < ny && z < nz && self.occupancy.get(x + nx * (y + ny * z))
    }

    #[inline]
    pub(crate) fn get_index(&self, i: usize) -> bool {
        self.occupancy.get(i)
    }

    pub fn set(&mut self, c: VoxelCoord, value: bool) -> Result<(), VolumeError> {
        if !self.in_bounds(c) {
            let [nx, ny, nz] = self.dims;
            return Err(VolumeError::OutOfBounds {
                x: c.x as u64,
                y: c.y as u64,
                z: c.z as u64,
                nx,
                ny,
                nz,
            });
        }
        let i = self.index_of(c);
        if value {
            if self.occupancy.insert(i) {
                self.foreground_count += 1;
            }
        } else if self.occupancy.remove(i) {
            self.foreground_count -= 1;
        }
        Ok(())
    }

    /// Sets every cell of the box `[origin, origin + size)` to `value`.
    pub fn fill_box(
        &mut self,
        origin: VoxelCoord,
        size: [usize; 3],
        value: bool,
    ) -> Result<(), VolumeError> {
        for z in origin.z..origin.z + size[2] {
            for y in origin.y..origin.y + size[1] {
                for x in origin.x..origin.x + size[0] {
                    self.set(VoxelCoord::new(x, y, z), value)?;
                }
            }
        }
        Ok(())
    }

    /// Foreground voxels in ascending linear-index order.
    pub fn foreground(&self) -> impl Iterator<Item = VoxelCoord> + '_ {
        self.occupancy.ones().map(|i| self.coord_of(i))
    }

    /// Copies the object into a grid of `dims`, shifted by `offset`.
    pub fn translated(&self, offset: [usize; 3], dims: [usize; 3]) -> Result<Self, VolumeError> {
        Self::from_coords(
            dims,
            self.foreground()
                .map(|c| VoxelCoord::new(c.x + offset[0], c.y + offset[1], c.z + offset[2])),
        )
    }

    /// Surrounds the grid with `layers` background layers on every side.
    pub fn padded(&self, layers: usize) -> Self {
        let [nx, ny, nz] = self.dims;
        self.translated(
            [layers; 3],
            [nx + 2 * layers, ny + 2 * layers, nz + 2 * layers],
        )
        .expect("padding only enlarges the grid")
    }

    /// Permutes axes: output axis `k` is input axis `perm[k]`.
    ///
    /// Panics if `perm` is not a permutation of `0..3`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let mut seen = [false; 3];
        for &p in &perm {
            assert!(p < 3 && !seen[p], "not an axis permutation: {perm:?}");
            seen[p] = true;
        }
        let dims = perm.map(|p| self.dims[p]);
        Self::from_coords(
            dims,
            self.foreground().map(|c| {
                let a = c.to_array();
                VoxelCoord::from(perm.map(|p| a[p]))
            }),
        )
        .expect("permutation preserves bounds")
    }

    /// Mirrors the grid along `axis`.
    pub fn reflected(&self, axis: usize) -> Self {
        assert!(axis < 3);
        let n = self.dims[axis];
        Self::from_coords(
            self.dims,
            self.foreground().map(|c| {
                let mut a = c.to_array();
                a[axis] = n - 1 - a[axis];
                VoxelCoord::from(a)
            }),
        )
        .expect("reflection preserves bounds")
    }
}

// ---------------------------------------------------------------------------
// File formats

/// On-disk volume encodings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum VolumeFormat {
    /// `.p3d`: `P3D` header line, dims line, one `x y z` line per voxel.
    Text,
    /// `.vox3`: `VOX3` magic, version byte, u32 LE dims, LSB-first bitmap.
    Binary,
}

impl VolumeFormat {
    /// Identifies the format from file content.
    pub fn sniff(bytes: &[u8]) -> Option<Self> {
        if bytes.starts_with(BINARY_MAGIC) {
            Some(Self::Binary)
        } else if bytes.starts_with(TEXT_MAGIC.as_bytes()) {
            Some(Self::Text)
        } else {
            None
        }
    }

    /// Guesses the format from a file extension.
    pub fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "p3d" => Some(Self::Text),
            "vox3" => Some(Self::Binary),
            _ => None,
        }
    }
}

pub fn load_volume(path: impl AsRef<Path>, format: VolumeFormat) -> Result<VoxelVolume, VolumeError> {
    let bytes = fs::read(path)?;
    decode(&bytes, format)
}

/// Loads a volume, choosing the decoder from the file's leading bytes.
pub fn load_volume_sniffed(path: impl AsRef<Path>) -> Result<VoxelVolume, VolumeError> {
    let bytes = fs::read(path)?;
    let format = VolumeFormat::sniff(&bytes).ok_or(VolumeError::UnknownFormat)?;
    decode(&bytes, format)
}

pub fn save_volume(
    v: &VoxelVolume,
    path: impl AsRef<Path>,
    format: VolumeFormat,
) -> Result<(), VolumeError> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode(v, format))?;
    f.flush()?;
    Ok(())
}

pub fn decode(bytes: &[u8], format: VolumeFormat) -> Result<VoxelVolume, VolumeError> {
    match format {
        VolumeFormat::Binary => decode_binary(bytes),
        VolumeFormat::Text => {
            let text = std::str::from_utf8(bytes)
                .map_err(|e| VolumeError::MalformedHeader(format!("not UTF-8 text: {e}")))?;
            decode_text(text)
        }
    }
}

pub fn encode(v: &VoxelVolume, format: VolumeFormat) -> Vec<u8> {
    match format {
        VolumeFormat::Binary => encode_binary(v),
        VolumeFormat::Text => encode_text(v).into_bytes(),
    }
}

pub fn encode_text(v: &VoxelVolume) -> String {
    use std::fmt::Write as _;
    let [nx, ny, nz] = v.dims();
    let mut out = format!("{TEXT_MAGIC}\n{nx} {ny} {nz}\n");
    for c in v.foreground() {
        let _ = writeln!(out, "{} {} {}", c.x, c.y, c.z);
    }
    out
}

fn parse_triple(line: &str, line_no: usize) -> Result<[u64; 3], VolumeError> {
    let bad = |message: String| VolumeError::MalformedLine {
        line: line_no,
        message,
    };
    let mut parts = line.split_whitespace();
    let mut out = [0u64; 3];
    for slot in &mut out {
        let tok = parts
            .next()
            .ok_or_else(|| bad(format!("expected three integers, got {line:?}")))?;
        *slot = tok
            .parse()
            .map_err(|_| bad(format!("not a non-negative integer: {tok:?}")))?;
    }
    if parts.next().is_some() {
        return Err(bad(format!("expected three integers, got {line:?}")));
    }
    Ok(out)
}

pub fn decode_text(text: &str) -> Result<VoxelVolume, VolumeError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, l)) if l == TEXT_MAGIC => {}
        other => {
            return Err(VolumeError::MalformedHeader(format!(
                "first line must be {TEXT_MAGIC:?}, got {:?}",
                other.map(|(_, l)| l).unwrap_or("")
            )))
        }
    }
    let (dims_line_no, dims_line) = lines
        .next()
        .ok_or_else(|| VolumeError::MalformedHeader("missing dimensions line".into()))?;
    let d = parse_triple(dims_line, dims_line_no)
        .map_err(|e| VolumeError::MalformedHeader(e.to_string()))?;
    let dims = d.map(|n| usize::try_from(n).unwrap_or(usize::MAX));
    let mut v = VoxelVolume::new(dims[0], dims[1], dims[2])?;
    for (line_no, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let [x, y, z] = parse_triple(t, line_no)?;
        let oob = || VolumeError::OutOfBounds {
            x,
            y,
            z,
            nx: dims[0],
            ny: dims[1],
            nz: dims[2],
        };
        let c = VoxelCoord::new(
            usize::try_from(x).map_err(|_| oob())?,
            usize::try_from(y).map_err(|_| oob())?,
            usize::try_from(z).map_err(|_| oob())?,
        );
        if !v.in_bounds(c) {
            return Err(oob());
        }
        v.set(c, true)?;
    }
    Ok(v)
}

pub fn encode_binary(v: &VoxelVolume) -> Vec<u8> {
    let n = v.cell_count();
    let mut out = Vec::with_capacity(BINARY_HEADER_LEN + n.div_ceil(8));
    out.extend_from_slice(BINARY_MAGIC);
    out.push(BINARY_VERSION);
    for d in v.dims() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    let mut bitmap = vec![0u8; n.div_ceil(8)];
    for i in v.occupancy.ones() {
        bitmap[i / 8] |= 1 << (i % 8);
    }
    out.extend_from_slice(&bitmap);
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<VoxelVolume, VolumeError> {
    if bytes.len() < BINARY_HEADER_LEN {
        return Err(VolumeError::MalformedHeader(format!(
            "binary header needs {BINARY_HEADER_LEN} bytes, file has {}",
            bytes.len()
        )));
    }
    if &bytes[0..4] != BINARY_MAGIC {
        return Err(VolumeError::MalformedHeader("missing VOX3 magic".into()));
    }
    if bytes[4] != BINARY_VERSION {
        return Err(VolumeError::UnsupportedVersion(bytes[4]));
    }
    let dim = |k: usize| {
        let o = 5 + 4 * k;
        u32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as usize
    };
    let mut v = VoxelVolume::new(dim(0), dim(1), dim(2))?;
    let n = v.cell_count();
    let expected = n.div_ceil(8);
    let bitmap = &bytes[BINARY_HEADER_LEN..];
    if bitmap.len() < expected {
        return Err(VolumeError::TruncatedBitmap {
            expected,
            found: bitmap.len(),
        });
    }
    if bitmap.len() > expected {
        return Err(VolumeError::TrailingBytes(bitmap.len() - expected));
    }
    if n % 8 != 0 && bitmap[expected - 1] >> (n % 8) != 0 {
        return Err(VolumeError::PaddingBitsSet);
    }
    let mut count = 0;
    for (bi, &byte) in bitmap.iter().enumerate() {
        let mut rest = byte;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            v.occupancy.insert(bi * 8 + b);
            count += 1;
        }
    }
    v.foreground_count = count;
    Ok(v)
}

// ---------------------------------------------------------------------------
// Connectivity

/// Sentinel label for cells outside the labeled set.
pub const UNLABELED: u32 = u32::MAX;

/// 6-connected component labels over one phase (foreground or background)
/// of a volume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLabeling {
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    /// Cell counts indexed by label.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Label of the cell with linear index `i`, if it belongs to the labeled phase.
    #[inline]
    pub fn label_at(&self, i: usize) -> Option<u32> {
        match self.labels[i] {
            UNLABELED => None,
            l => Some(l),
        }
    }

    pub fn label_of(&self, v: &VoxelVolume, c: VoxelCoord) -> Option<u32> {
        if v.in_bounds(c) {
            self.label_at(v.index_of(c))
        } else {
            None
        }
    }
}

/// Flood-fills every unlabeled cell reachable from `stack` whose occupancy
/// equals `phase`, assigning `label`. Returns the number of cells labeled.
fn flood(v: &VoxelVolume, phase: bool, labels: &mut [u32], stack: &mut Vec<usize>, label: u32) -> usize {
    let [nx, ny, nz] = v.dims();
    let plane = nx * ny;
    let mut size = 0;
    while let Some(i) = stack.pop() {
        size += 1;
        let x = i % nx;
        let y = (i / nx) % ny;
        let z = i / plane;
        let mut visit = |j: usize| {
            if labels[j] == UNLABELED && v.get_index(j) == phase {
                labels[j] = label;
                stack.push(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < nx {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - nx);
        }
        if y + 1 < ny {
            visit(i + nx);
        }
        if z > 0 {
            visit(i - plane);
        }
        if z + 1 < nz {
            visit(i + plane);
        }
    }
    size
}

fn label_remaining(v: &VoxelVolume, phase: bool, labels: &mut [u32], sizes: &mut Vec<usize>) {
    let mut stack = Vec::new();
    for i in 0..v.cell_count() {
        if labels[i] == UNLABELED && v.get_index(i) == phase {
            let label = sizes.len() as u32;
            labels[i] = label;
            stack.push(i);
            sizes.push(flood(v, phase, labels, &mut stack, label));
        }
    }
}

/// Labels foreground voxels by direct (face) adjacency. Labels are assigned
/// in order of each component's lowest linear index.
pub fn foreground_components(v: &VoxelVolume) -> ComponentLabeling {
    let mut labels = vec![UNLABELED; v.cell_count()];
    let mut sizes = Vec::new();
    label_remaining(v, true, &mut labels, &mut sizes);
    ComponentLabeling { labels, sizes }
}

/// Labels background voxels by face adjacency, with a virtual exterior
/// region joined to every background voxel on the grid's outer faces.
///
/// Returns the exterior's label (always 0) and the labeling. The exterior
/// exists even when no background voxel touches the grid boundary, in which
/// case its size is 0. Every other label is a bounded cavity.
pub fn background_components(v: &VoxelVolume) -> (u32, ComponentLabeling) {
    const EXTERIOR: u32 = 0;
    let [nx, ny, nz] = v.dims();
    let mut labels = vec![UNLABELED; v.cell_count()];
    let mut stack = Vec::new();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let on_border =
                    x == 0 || y == 0 || z == 0 || x + 1 == nx || y + 1 == ny || z + 1 == nz;
                if !on_border {
                    continue;
                }
                let i = x + nx * (y + ny * z);
                if !v.get_index(i) && labels[i] == UNLABELED {
                    labels[i] = EXTERIOR;
                    stack.push(i);
                }
            }
        }
    }
    let mut sizes = vec![flood(v, false, &mut labels, &mut stack, EXTERIOR)];
    label_remaining(v, false, &mut labels, &mut sizes);
    (EXTERIOR, ComponentLabeling { labels, sizes })
}

/// Number of bounded background components.
pub fn cavity_count(v: &VoxelVolume) -> usize {
    background_components(v).1.component_count() - 1
}
