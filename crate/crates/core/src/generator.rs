//! Test shapes with known topology.
//!
//! Every fixture carries its expected invariants: per-component boundary
//! genera, the Betti triple and, where known in closed form, the surface
//! point counts. [`random_manifold`] composes primitives disjointly so the
//! expectations of a composite follow by addition.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::volume::{VolumeError, VoxelCoord, VoxelVolume};

#[derive(Debug, thiserror::Error)]
pub enum GeneratorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

/// Expected surface point counts. `m4` is `None` where no closed form is
/// tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpectedCounts {
    pub m3: u64,
    pub m4: Option<u64>,
    pub m5: u64,
    pub m6: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpectedSurface {
    pub genus: u32,
    pub counts: Option<ExpectedCounts>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    /// Boundary surfaces of each component, outer surface first.
    pub components: Vec<Vec<ExpectedSurface>>,
    pub betti: [u64; 3],
}

impl Expected {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn genera(&self) -> Vec<Vec<u32>> {
        self.components
            .iter()
            .map(|c| c.iter().map(|s| s.genus).collect())
            .collect()
    }

    /// `b0 − b1 + b2 = ½ χ(∂M)` with `b3 = 0`.
    pub fn is_euler_consistent(&self) -> bool {
        let [b0, b1, b2] = self.betti.map(|b| b as i64);
        let boundary: i64 = self
            .components
            .iter()
            .flatten()
            .map(|s| 2 - 2 * i64::from(s.genus))
            .sum();
        2 * (b0 - b1 + b2) == boundary
    }

    fn merge(&mut self, other: Expected) {
        self.components.extend(other.components);
        for (a, b) in self.betti.iter_mut().zip(other.betti) {
            *a += b;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub volume: VoxelVolume,
    pub expected: Expected,
}

impl Fixture {
    fn new(name: String, volume: VoxelVolume, expected: Expected) -> Self {
        assert!(
            expected.is_euler_consistent(),
            "fixture {name} declares inconsistent invariants"
        );
        Self {
            name,
            volume,
            expected,
        }
    }
}

fn filled(dims: [usize; 3]) -> Result<VoxelVolume, GeneratorError> {
    let mut v = VoxelVolume::new(dims[0], dims[1], dims[2])?;
    v.fill_box(VoxelCoord::new(0, 0, 0), dims, true)?;
    Ok(v)
}

/// Lattice points on the surface of a `w × h × d` box.
fn box_surface_points(w: usize, h: usize, d: usize) -> u64 {
    let outer = (w + 1) * (h + 1) * (d + 1);
    let inner = (w - 1) * (h - 1) * (d - 1);
    (outer - inner) as u64
}

fn convex_box_surface(w: usize, h: usize, d: usize) -> ExpectedSurface {
    ExpectedSurface {
        genus: 0,
        counts: Some(ExpectedCounts {
            m3: 8,
            m4: Some(box_surface_points(w, h, d) - 8),
            m5: 0,
            m6: 0,
        }),
    }
}

/// Solid `w × h × d` cuboid.
pub fn cuboid(w: usize, h: usize, d: usize) -> Result<Fixture, GeneratorError> {
    let volume = filled([w, h, d])?;
    Ok(Fixture::new(
        format!("box({w},{h},{d})"),
        volume,
        Expected {
            components: vec![vec![convex_box_surface(w, h, d)]],
            betti: [1, 0, 0],
        },
    ))
}

/// One-voxel-thick `(2g+1) × 3` plate with `g` unit holes at
/// `x = 1, 3, …, 2g−1`, `y = 1`: a solid handlebody of genus `g`.
pub fn plate_with_holes(g: usize) -> Result<Fixture, GeneratorError> {
    let w = 2 * g + 1;
    let mut volume = filled([w, 3, 1])?;
    for k in 0..g {
        volume.set(VoxelCoord::new(2 * k + 1, 1, 0), false)?;
    }
    let g64 = g as u64;
    // Every lattice point of the two (2g+2) × 4 layers lies on the surface.
    let points = 2 * 4 * (2 * g64 + 2);
    Ok(Fixture::new(
        format!("plate_with_holes({g})"),
        volume,
        Expected {
            components: vec![vec![ExpectedSurface {
                genus: g as u32,
                counts: Some(ExpectedCounts {
                    m3: 8,
                    m4: Some(points - 8 - 8 * g64),
                    m5: 8 * g64,
                    m6: 0,
                }),
            }]],
            betti: [1, g64, 0],
        },
    ))
}

/// Flat U (two 3-wide arms joined by a 3-wide base) with up to two arches,
/// each rising from the left arm and landing on the right one. The first
/// arch sits above the U, the second below.
pub fn u_shape(handles: usize) -> Result<Fixture, GeneratorError> {
    if handles > 2 {
        return Err(GeneratorError::InvalidParameter(format!(
            "u_shape takes 0, 1 or 2 handles, got {handles}"
        )));
    }
    const WIDTH: usize = 9;
    const HEIGHT: usize = 7;
    const ARM: usize = 3;
    const ARCH_Y: usize = 5;
    let (depth, slab) = match handles {
        0 => (1, 0),
        1 => (3, 0),
        _ => (5, 2),
    };
    let mut volume = VoxelVolume::new(WIDTH, HEIGHT, depth)?;
    volume.fill_box(VoxelCoord::new(0, 0, slab), [ARM, HEIGHT, 1], true)?;
    volume.fill_box(VoxelCoord::new(WIDTH - ARM, 0, slab), [ARM, HEIGHT, 1], true)?;
    volume.fill_box(VoxelCoord::new(ARM, 0, slab), [WIDTH - 2 * ARM, ARM, 1], true)?;

    let (left, right) = (1, WIDTH - 2);
    let mut arch = |post_z: usize, bar_z: usize| -> Result<(), VolumeError> {
        volume.set(VoxelCoord::new(left, ARCH_Y, post_z), true)?;
        volume.set(VoxelCoord::new(right, ARCH_Y, post_z), true)?;
        volume.fill_box(VoxelCoord::new(left, ARCH_Y, bar_z), [right - left + 1, 1, 1], true)
    };
    if handles >= 1 {
        arch(slab + 1, slab + 2)?;
    }
    if handles == 2 {
        arch(slab - 1, slab - 2)?;
    }

    let h = handles as u64;
    Ok(Fixture::new(
        format!("u_shape({handles})"),
        volume,
        Expected {
            components: vec![vec![ExpectedSurface {
                genus: handles as u32,
                counts: Some(ExpectedCounts {
                    m3: 12 + 4 * h,
                    m4: None,
                    m5: 4 + 12 * h,
                    m6: 0,
                }),
            }]],
            betti: [1, h, 0],
        },
    ))
}

/// `outer³` cube with a centered `cavity³` hole.
pub fn hollow_box(outer: usize, cavity: usize) -> Result<Fixture, GeneratorError> {
    if outer < 3 || cavity < 1 || cavity + 2 > outer {
        return Err(GeneratorError::InvalidParameter(format!(
            "hollow_box needs outer >= 3 and 1 <= cavity <= outer - 2, got ({outer}, {cavity})"
        )));
    }
    let mut volume = filled([outer; 3])?;
    let o = (outer - cavity) / 2;
    volume.fill_box(VoxelCoord::new(o, o, o), [cavity; 3], false)?;
    Ok(Fixture::new(
        format!("hollow_box({outer},{cavity})"),
        volume,
        Expected {
            components: vec![vec![
                convex_box_surface(outer, outer, outer),
                convex_box_surface(cavity, cavity, cavity),
            ]],
            betti: [1, 0, 1],
        },
    ))
}

fn random_primitive(rng: &mut ChaCha8Rng) -> Result<Fixture, GeneratorError> {
    let base = match rng.gen_range(0..4) {
        0 => cuboid(rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4))?,
        1 => plate_with_holes(rng.gen_range(0..=3))?,
        2 => {
            let outer = rng.gen_range(3..=5);
            hollow_box(outer, rng.gen_range(1..=outer - 2))?
        }
        _ => u_shape(rng.gen_range(0..=2))?,
    };
    let mut perm = [0, 1, 2];
    perm.shuffle(rng);
    let mut volume = base.volume.permuted(perm);
    for axis in 0..3 {
        if rng.gen_bool(0.5) {
            volume = volume.reflected(axis);
        }
    }
    Ok(Fixture {
        name: format!("{}[perm={perm:?}]", base.name),
        volume,
        expected: base.expected,
    })
}

/// Deterministic composite of `budget` random primitives (boxes, plates with
/// holes, hollow boxes, U shapes), each randomly re-oriented and placed in a
/// row along x with at least one background voxel between neighbors.
pub fn random_manifold(seed: u64, budget: usize) -> Result<Fixture, GeneratorError> {
    if budget == 0 {
        return Err(GeneratorError::InvalidParameter("budget must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed = Vec::with_capacity(budget);
    let mut cursor = rng.gen_range(0..=1);
    let mut extent = [0usize; 3];
    for _ in 0..budget {
        let prim = random_primitive(&mut rng)?;
        let [w, h, d] = prim.volume.dims();
        let offset = [cursor, rng.gen_range(0..=2), rng.gen_range(0..=2)];
        cursor += w + rng.gen_range(1..=2);
        extent[1] = extent[1].max(offset[1] + h);
        extent[2] = extent[2].max(offset[2] + d);
        placed.push((prim, offset));
    }
    extent[0] = cursor;
    let pad = rng.gen_range(0..=1);
    let dims = [extent[0], extent[1] + pad, extent[2] + pad];

    let mut volume = VoxelVolume::new(dims[0], dims[1], dims[2])?;
    let mut expected = Expected {
        components: Vec::new(),
        betti: [0; 3],
    };
    let mut names = Vec::with_capacity(budget);
    for (prim, offset) in placed {
        for c in prim.volume.foreground() {
            volume.set(
                VoxelCoord::new(c.x + offset[0], c.y + offset[1], c.z + offset[2]),
                true,
            )?;
        }
        expected.merge(prim.expected);
        names.push(prim.name);
    }
    Ok(Fixture::new(
        format!("random_manifold({seed},{budget}): {}", names.join(" + ")),
        volume,
        expected,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_errors() {
        assert!(hollow_box(2, 1).is_err());
        assert!(hollow_box(4, 3).is_err());
        assert!(hollow_box(5, 0).is_err());
        assert!(u_shape(3).is_err());
        assert!(random_manifold(0, 0).is_err());
        assert!(cuboid(0, 1, 1).is_err());
    }

    #[test]
    fn plate_zero_is_a_bar() {
        let f = plate_with_holes(0).unwrap();
        assert_eq!(f.volume.dims(), [1, 3, 1]);
        assert_eq!(f.volume.foreground_count(), 3);
        assert_eq!(f.expected.genera(), vec![vec![0]]);
    }

    #[test]
    fn hollow_box_cavity_is_centered() {
        let f = hollow_box(5, 3).unwrap();
        assert_eq!(f.volume.foreground_count(), 125 - 27);
        assert!(!f.volume.get(VoxelCoord::new(1, 1, 1)));
        assert!(f.volume.get(VoxelCoord::new(0, 0, 0)));
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_manifold(7, 3).unwrap();
        let b = random_manifold(7, 3).unwrap();
        assert_eq!(a.volume, b.volume);
        assert_eq!(a.expected, b.expected);
        assert_eq!(a.expected.component_count(), 3);
        let single = random_manifold(0, 1).unwrap();
        assert_eq!(single.expected.component_count(), 1);
    }

    #[test]
    fn expectations_are_consistent() {
        for f in [
            cuboid(4, 3, 2).unwrap(),
            plate_with_holes(3).unwrap(),
            u_shape(2).unwrap(),
            hollow_box(5, 1).unwrap(),
        ] {
            assert!(f.expected.is_euler_consistent(), "{}", f.name);
        }
    }
}
