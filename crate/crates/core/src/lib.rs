//! Topological invariants of 3D binary voxel images.
//!
//! Foreground voxels are closed unit cubes joined by face adjacency. For a
//! solid whose boundary is a union of closed digital surfaces, the crate
//! computes in linear time:
//!
//! * the genus of every boundary surface, by counting surface points by
//!   their number of incident faces ([`invariants`]);
//! * the homology groups `H_0 … H_3` of every connected component, from
//!   those genera ([`homology`]).
//!
//! [`oracle`] recomputes the Betti numbers by brute-force cell counting as
//! an independent check, [`generator`] builds shapes with known answers, and
//! [`invariants::mesh`] handles closed triangle meshes.
//!
//! ```
//! use voxtopo::{generator, homology};
//!
//! let torus = generator::plate_with_holes(1).unwrap();
//! let report = homology::assemble_report(&torus.volume).unwrap();
//! assert_eq!(report.total.presentation(), ["Z", "Z", "0", "0"]);
//! ```

mod bits;

pub mod bench;
pub mod boundary;
pub mod cli;
pub mod generator;
pub mod homology;
pub mod invariants;
pub mod oracle;
pub mod volume;

pub use boundary::{extract_boundary, validate_manifold, BoundarySurface, ManifoldViolation};
pub use homology::{assemble_report, HomologyGroups, TopologyReport};
pub use invariants::{classify, genus, SurfaceClassification};
pub use volume::{VoxelCoord, VoxelVolume};
