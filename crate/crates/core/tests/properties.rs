use proptest::prelude::*;

use voxtopo::boundary::{extract_boundary, validate_manifold};
use voxtopo::generator::{cuboid, hollow_box, plate_with_holes, random_manifold, u_shape, Fixture};
use voxtopo::homology::{assemble_report, component_homology, HomologyGroups, TopologyReport};
use voxtopo::invariants::mesh::{mesh_genus, TriMesh};
use voxtopo::oracle::{cell_counts, compare, oracle_betti, Comparison};
use voxtopo::volume::{
    background_components, cavity_count, decode, encode, foreground_components, load_volume_sniffed,
    save_volume, VolumeFormat, VoxelCoord, VoxelVolume,
};

/// Arbitrary small grid with roughly `density` percent foreground.
fn any_volume(max_side: usize) -> impl Strategy<Value = VoxelVolume> {
    (1..=max_side, 1..=max_side, 1..=max_side, 0u8..=100).prop_flat_map(|(nx, ny, nz, density)| {
        proptest::collection::vec(proptest::bool::weighted(f64::from(density) / 100.0), nx * ny * nz)
            .prop_map(move |bits| {
                let mut v = VoxelVolume::new(nx, ny, nz).unwrap();
                for (i, b) in bits.into_iter().enumerate() {
                    if b {
                        let c = VoxelCoord::new(i % nx, (i / nx) % ny, i / (nx * ny));
                        v.set(c, true).unwrap();
                    }
                }
                v
            })
    })
}

fn fixture_params() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 1usize..=5)
}

fn fixture(seed: u64, budget: usize) -> Fixture {
    random_manifold(seed, budget).unwrap()
}

fn report(v: &VoxelVolume) -> TopologyReport {
    assemble_report(v).unwrap()
}

fn sorted_genera(r: &TopologyReport) -> Vec<u32> {
    let mut g = r.genera().concat();
    g.sort_unstable();
    g
}

fn betti3(h: &HomologyGroups) -> [i64; 3] {
    [h.b0 as i64, h.b1 as i64, h.b2 as i64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn file_formats_round_trip(v in any_volume(9)) {
        for format in [VolumeFormat::Text, VolumeFormat::Binary] {
            let bytes = encode(&v, format);
            prop_assert_eq!(VolumeFormat::sniff(&bytes), Some(format));
            prop_assert_eq!(&decode(&bytes, format).unwrap(), &v);
        }
    }

    #[test]
    fn labeling_is_a_partition(v in any_volume(8)) {
        let labels = foreground_components(&v);
        prop_assert_eq!(labels.sizes().iter().sum::<usize>(), v.foreground_count());
        prop_assert!(labels.sizes().iter().all(|&s| s > 0));
        for c in v.foreground() {
            let l = labels.label_of(&v, c).unwrap() as usize;
            prop_assert!(l < labels.component_count());
            for (dx, dy, dz) in [(1i64, 0i64, 0i64), (0, 1, 0), (0, 0, 1)] {
                let (x, y, z) = (c.x as i64 + dx, c.y as i64 + dy, c.z as i64 + dz);
                if v.is_foreground(x, y, z) {
                    let n = VoxelCoord::new(x as usize, y as usize, z as usize);
                    prop_assert_eq!(labels.label_of(&v, n), Some(l as u32));
                }
            }
        }
        for i in 0..v.cell_count() {
            prop_assert_eq!(labels.label_at(i).is_some(), v.get(v.coord_of(i)));
        }
    }

    #[test]
    fn labeling_ignores_translation(v in any_volume(6), off in (0usize..3, 0usize..3, 0usize..3)) {
        let [nx, ny, nz] = v.dims();
        let moved = v.translated([off.0, off.1, off.2], [nx + 3, ny + 3, nz + 3]).unwrap();
        let (a, b) = (foreground_components(&v), foreground_components(&moved));
        prop_assert_eq!(a.sizes(), b.sizes());
    }

    #[test]
    fn cavities_ignore_padding(v in any_volume(7)) {
        prop_assert_eq!(cavity_count(&v), cavity_count(&v.padded(1)));
        let (exterior, bg) = background_components(&v);
        prop_assert_eq!(exterior, 0);
        prop_assert_eq!(
            bg.sizes().iter().sum::<usize>(),
            v.cell_count() - v.foreground_count()
        );
    }

    /// Wherever the fast path accepts an arbitrary grid, it matches the oracle.
    #[test]
    fn accepted_grids_agree_with_oracle(v in any_volume(6)) {
        match compare(&v) {
            Comparison::Agree { .. } => prop_assert!(validate_manifold(&v).is_empty()),
            Comparison::Incomparable { violations, .. } => prop_assert!(!violations.is_empty()),
            Comparison::Disagree { fast, oracle, .. } => {
                prop_assert!(false, "fast {:?} vs oracle {:?}", fast, oracle)
            }
        }
    }

    #[test]
    fn quad_surface_counts((seed, budget) in fixture_params()) {
        let f = fixture(seed, budget);
        let labels = foreground_components(&f.volume);
        let surfaces = extract_boundary(&f.volume, &labels).unwrap();
        prop_assert!(surfaces.len() >= labels.component_count());
        let mut owners: Vec<u32> = surfaces.iter().map(|s| s.owner_component).collect();
        owners.sort_unstable();
        owners.dedup();
        prop_assert_eq!(owners.len(), labels.component_count());
        for s in &surfaces {
            let incidence = s.vertex_incidence();
            let total: usize = incidence.values().map(|&m| usize::from(m)).sum();
            prop_assert_eq!(total, 4 * s.face_count);
            prop_assert_eq!(2 * s.edge_count, 4 * s.face_count);
            prop_assert_eq!(incidence.len(), s.vertex_count);
            prop_assert!(incidence.values().all(|m| (3..=6).contains(m)));
        }
    }

    #[test]
    fn topology_ignores_rigid_motions(
        (seed, budget) in fixture_params(),
        perm in Just([0usize, 1, 2]).prop_shuffle(),
        flips in proptest::array::uniform3(any::<bool>()),
        off in (0usize..3, 0usize..3, 0usize..3),
    ) {
        let f = fixture(seed, budget);
        let base = report(&f.volume);
        let mut moved = f.volume.permuted(perm);
        for (axis, flip) in flips.into_iter().enumerate() {
            if flip {
                moved = moved.reflected(axis);
            }
        }
        let [nx, ny, nz] = moved.dims();
        let moved = moved.translated([off.0, off.1, off.2], [nx + off.0, ny + off.1, nz + off.2]).unwrap();
        let r = report(&moved);
        prop_assert_eq!(r.total, base.total);
        prop_assert_eq!(sorted_genera(&r), sorted_genera(&base));
        let mut a: Vec<_> = r.surfaces().map(|s| (s.classification, s.vertices, s.edges, s.faces)).collect();
        let mut b: Vec<_> = base.surfaces().map(|s| (s.classification, s.vertices, s.edges, s.faces)).collect();
        a.sort_by_key(|x| (x.1, x.2, x.3, x.0.m3, x.0.m4, x.0.m5, x.0.m6));
        b.sort_by_key(|x| (x.1, x.2, x.3, x.0.m3, x.0.m4, x.0.m5, x.0.m6));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fixtures_match_declared_and_oracle((seed, budget) in fixture_params()) {
        let f = fixture(seed, budget);
        prop_assert!(validate_manifold(&f.volume).is_empty());
        let r = report(&f.volume);
        let declared = f.expected.betti.map(|b| b as i64);
        prop_assert_eq!(betti3(&r.total), declared);
        prop_assert_eq!(oracle_betti(&f.volume).triple(), declared);
        prop_assert_eq!(r.total.b3, 0);
        let mut want = f.expected.genera().concat();
        want.sort_unstable();
        prop_assert_eq!(sorted_genera(&r), want);
    }

    #[test]
    fn direct_sum_over_components((seed, budget) in fixture_params()) {
        let r = report(&fixture(seed, budget).volume);
        prop_assert_eq!(r.total.b0 as usize, r.component_count);
        let sum: HomologyGroups = r.per_component.iter().map(|c| c.homology).sum();
        prop_assert_eq!(sum, r.total);
        for c in &r.per_component {
            prop_assert_eq!(c.homology, component_homology(&c.genera()).unwrap());
            prop_assert_eq!(2 * c.euler_solid, c.euler_boundary);
        }
    }

    #[test]
    fn disjoint_unions_add(a in fixture_params(), b in fixture_params()) {
        let (fa, fb) = (fixture(a.0, a.1), fixture(b.0, b.1));
        let [ax, ay, az] = fa.volume.dims();
        let [bx, by, bz] = fb.volume.dims();
        let dims = [ax + 1 + bx, ay.max(by), az.max(bz)];
        let mut joined = fa.volume.translated([0, 0, 0], dims).unwrap();
        for c in fb.volume.foreground() {
            joined.set(VoxelCoord::new(c.x + ax + 1, c.y, c.z), true).unwrap();
        }
        prop_assert_eq!(
            cell_counts(&joined),
            cell_counts(&fa.volume) + cell_counts(&fb.volume)
        );
        prop_assert_eq!(report(&joined).total, report(&fa.volume).total + report(&fb.volume).total);
    }

    #[test]
    fn mesh_genus_ignores_scale(n in 3usize..12, m in 3usize..12, factor in 1e-3f64..1e3) {
        let mut mesh = TriMesh::torus(n, m);
        mesh.append(&TriMesh::tetrahedron());
        let a = mesh_genus(&mesh).unwrap();
        let b = mesh_genus(&mesh.scaled(factor)).unwrap();
        prop_assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.genus, y.genus);
            prop_assert_eq!(x.euler, y.euler);
            let tol = 1e-6 * (1.0 + x.angle_defect_total.abs());
            prop_assert!((x.angle_defect_total - y.angle_defect_total).abs() <= tol);
        }
    }
}

#[test]
fn hollow_boxes_have_one_cavity() {
    for (outer, cavity) in [(3, 1), (5, 3), (5, 1)] {
        let f = hollow_box(outer, cavity).unwrap();
        let r = report(&f.volume);
        assert_eq!(r.total.betti(), [1, 0, 1, 0]);
        assert_eq!(r.genera(), vec![vec![0, 0]]);
        assert_eq!(oracle_betti(&f.volume).triple(), [1, 0, 1]);
    }
    let r = report(&hollow_box(5, 1).unwrap().volume);
    let faces: Vec<usize> = r.surfaces().map(|s| s.faces).collect();
    assert_eq!(faces, vec![150, 6]);
}

#[test]
fn plate_with_three_holes() {
    let r = report(&plate_with_holes(3).unwrap().volume);
    assert_eq!(r.component_count, 1);
    assert_eq!(r.genera(), vec![vec![3]]);
    assert_eq!(r.total.presentation()[1], "Z^3");
}

#[test]
fn plate_without_holes_is_a_bar() {
    let f = plate_with_holes(0).unwrap();
    assert_eq!(f.volume.dims(), [1, 3, 1]);
    assert_eq!(report(&f.volume).genera(), vec![vec![0]]);
}

#[test]
fn convex_boxes() {
    for (w, h, d) in [(4, 3, 2), (1, 1, 9), (3, 3, 3)] {
        let f = cuboid(w, h, d).unwrap();
        let r = report(&f.volume);
        let s: Vec<_> = r.surfaces().collect();
        assert_eq!(s.len(), 1);
        let c = s[0].classification;
        assert_eq!((c.m3, c.m5, c.m6, s[0].genus), (8, 0, 0, 0));
        assert_eq!(c.m4 as usize, s[0].vertices - 8);
        assert_eq!(oracle_betti(&f.volume).triple(), [1, 0, 0]);
    }
}

#[test]
fn u_shapes_match_declared_counts() {
    for h in 0..=2 {
        let f = u_shape(h).unwrap();
        let r = report(&f.volume);
        let c = r.surfaces().next().unwrap().classification;
        let want = f.expected.components[0][0].counts.unwrap();
        assert_eq!((c.m3, c.m5, c.m6), (want.m3, want.m5, want.m6));
        assert_eq!(r.total.b1, h as u64);
    }
}

#[test]
fn random_composites_are_deterministic_sums() {
    let a = random_manifold(7, 3).unwrap();
    let b = random_manifold(7, 3).unwrap();
    assert_eq!(a.volume, b.volume);
    assert_eq!(a.expected.component_count(), 3);
    assert_eq!(foreground_components(&a.volume).component_count(), 3);
    assert_eq!(
        oracle_betti(&a.volume).triple(),
        a.expected.betti.map(|x| x as i64)
    );
    let single = random_manifold(0, 1).unwrap();
    assert_eq!(single.expected.component_count(), 1);
}

/// Genus-2 block around a ring-shaped void and a unit void: boundary genera
/// 2, 1 and 0.
#[test]
fn block_with_torus_cavity() {
    let mut v = VoxelVolume::new(11, 9, 7).unwrap();
    v.fill_box(VoxelCoord::new(0, 0, 0), [11, 9, 7], true).unwrap();
    v.fill_box(VoxelCoord::new(1, 1, 0), [1, 1, 7], false).unwrap();
    v.fill_box(VoxelCoord::new(9, 1, 0), [1, 1, 7], false).unwrap();
    v.fill_box(VoxelCoord::new(4, 3, 3), [3, 3, 1], false).unwrap();
    v.set(VoxelCoord::new(5, 4, 3), true).unwrap();
    v.set(VoxelCoord::new(5, 4, 5), false).unwrap();

    let r = report(&v);
    assert_eq!(r.genera(), vec![vec![2, 1, 0]]);
    assert_eq!(r.total.presentation(), ["Z", "Z^3", "Z^2", "0"].map(String::from));
    assert_eq!(oracle_betti(&v).triple(), [1, 3, 2]);
}

#[test]
fn saved_fixture_analyzes_like_the_original() {
    let dir = tempfile::tempdir().unwrap();
    let f = random_manifold(11, 4).unwrap();
    let direct = report(&f.volume);
    for (name, format) in [("f.p3d", VolumeFormat::Text), ("f.vox3", VolumeFormat::Binary)] {
        let path = dir.path().join(name);
        save_volume(&f.volume, &path, format).unwrap();
        let loaded = load_volume_sniffed(&path).unwrap();
        assert_eq!(loaded, f.volume);
        assert_eq!(report(&loaded), direct);
    }
}
