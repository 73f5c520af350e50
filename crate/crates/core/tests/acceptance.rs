//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p voxtopo --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use voxtopo::bench::bench_boxes;
use voxtopo::boundary::{extract_boundary, validate_manifold, ViolationKind};
use voxtopo::generator::{cuboid, hollow_box, plate_with_holes, random_manifold, u_shape, Fixture};
use voxtopo::homology::{assemble_report, TopologyReport};
use voxtopo::invariants::mesh::{mesh_genus, TriMesh};
use voxtopo::invariants::{classify, genus};
use voxtopo::oracle::{compare, oracle_betti, Comparison};
use voxtopo::volume::{foreground_components, VoxelCoord, VoxelVolume};

type Outcome = Result<String, String>;

const RANDOM_FIXTURES: u64 = 1200;

fn named_fixtures() -> Vec<Fixture> {
    let mut out = vec![
        cuboid(1, 1, 1).unwrap(),
        cuboid(2, 1, 1).unwrap(),
        cuboid(4, 3, 2).unwrap(),
        cuboid(1, 1, 9).unwrap(),
        hollow_box(3, 1).unwrap(),
        hollow_box(5, 3).unwrap(),
        hollow_box(6, 2).unwrap(),
    ];
    for g in 0..=4 {
        out.push(plate_with_holes(g).unwrap());
    }
    for h in 0..=2 {
        out.push(u_shape(h).unwrap());
    }
    out
}

fn random_fixture(i: u64) -> Fixture {
    random_manifold(i, 1 + (i % 6) as usize).unwrap()
}

fn analyze(f: &Fixture) -> Result<TopologyReport, String> {
    assemble_report(&f.volume).map_err(|e| format!("{}: {e}", f.name))
}

/// Median of `runs` timed analyses, after one untimed warm-up.
fn median_analysis_seconds(v: &VoxelVolume, runs: usize) -> f64 {
    std::hint::black_box(assemble_report(v).unwrap());
    let mut times: Vec<f64> = (0..runs)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(assemble_report(v).unwrap());
            start.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[runs / 2]
}

fn figure_two() -> Outcome {
    let cases = [
        (cuboid(1, 1, 1).unwrap(), (8, 0, 0), 0),
        (plate_with_holes(1).unwrap(), (8, 8, 0), 1),
        (plate_with_holes(2).unwrap(), (8, 16, 0), 2),
    ];
    let mut notes = Vec::new();
    for (f, counts, g) in cases {
        let report = analyze(&f)?;
        let s: Vec<_> = report.surfaces().collect();
        if s.len() != 1 {
            return Err(format!("{}: {} surfaces", f.name, s.len()));
        }
        let c = s[0].classification;
        if (c.m3, c.m5, c.m6) != counts || s[0].genus != g {
            return Err(format!(
                "{}: (m3,m5,m6)=({},{},{}) genus {}",
                f.name, c.m3, c.m5, c.m6, s[0].genus
            ));
        }
        let secs = median_analysis_seconds(&f.volume, 9);
        if secs >= 1e-3 {
            return Err(format!("{}: {:.3} ms", f.name, secs * 1e3));
        }
        notes.push(format!("{} {:.1} us", f.name, secs * 1e6));
    }
    Ok(notes.join(", "))
}

fn figure_three() -> Outcome {
    let expected = [(12, 4), (16, 16), (20, 28)];
    for (h, counts) in expected.into_iter().enumerate() {
        let f = u_shape(h).unwrap();
        let report = analyze(&f)?;
        let s: Vec<_> = report.surfaces().collect();
        if s.len() != 1 {
            return Err(format!("{}: {} surfaces", f.name, s.len()));
        }
        let c = s[0].classification;
        if (c.m3, c.m5) != counts || s[0].genus != h as u32 {
            return Err(format!(
                "{}: (m3,m5)=({},{}) genus {}",
                f.name, c.m3, c.m5, s[0].genus
            ));
        }
    }
    Ok("(12,4) (16,16) (20,28), genera 0 1 2".into())
}

fn homology_groups() -> Outcome {
    let cases = [
        (plate_with_holes(1).unwrap(), ["Z", "Z", "0", "0"]),
        (hollow_box(3, 1).unwrap(), ["Z", "0", "Z", "0"]),
        (hollow_box(5, 3).unwrap(), ["Z", "0", "Z", "0"]),
        (plate_with_holes(3).unwrap(), ["Z", "Z^3", "0", "0"]),
    ];
    for (f, want) in cases {
        let got = analyze(&f)?.total.presentation();
        if got != want.map(String::from) {
            return Err(format!("{}: {:?}", f.name, got));
        }
    }
    Ok("solid torus (Z,Z,0,0), hollow box (Z,0,Z,0)".into())
}

fn oracle_equivalence() -> Outcome {
    for i in 0..RANDOM_FIXTURES {
        let f = random_fixture(i);
        match compare(&f.volume) {
            Comparison::Agree { betti } => {
                if betti != f.expected.betti.map(|b| b as i64) {
                    return Err(format!("{}: {:?} vs declared {:?}", f.name, betti, f.expected.betti));
                }
            }
            other => return Err(format!("{}: {:?}", f.name, other)),
        }
        let mut got = analyze(&f)?.genera().concat();
        let mut want = f.expected.genera().concat();
        got.sort_unstable();
        want.sort_unstable();
        if got != want {
            return Err(format!("{}: genera {got:?} vs {want:?}", f.name));
        }
    }
    Ok(format!("{RANDOM_FIXTURES} random fixtures agree"))
}

fn euler_identities(fixtures: &[Fixture]) -> Outcome {
    let mut surfaces = 0usize;
    for f in fixtures {
        let labels = foreground_components(&f.volume);
        let extracted = extract_boundary(&f.volume, &labels).map_err(|e| format!("{}: {e}", f.name))?;
        for s in &extracted {
            let c = classify(s).map_err(|e| e.to_string())?;
            let g = i64::from(genus(&c).map_err(|e| e.to_string())?);
            if c.total_curvature() != 8 - 8 * g {
                return Err(format!("{} surface {}: curvature {}", f.name, s.id, c.total_curvature()));
            }
            if s.euler_characteristic() != 2 - 2 * g {
                return Err(format!("{} surface {}: V-E+F {}", f.name, s.id, s.euler_characteristic()));
            }
            surfaces += 1;
        }
        let report = analyze(f)?;
        for comp in &report.per_component {
            if 2 * comp.euler_solid != comp.euler_boundary {
                return Err(format!("{} component {}: chi mismatch", f.name, comp.component_id));
            }
        }
        // Solid Euler characteristic from the independent cell count.
        if 2 * oracle_betti(&f.volume).euler != report.euler_boundary() {
            return Err(format!("{}: cell-count chi disagrees with boundary", f.name));
        }
    }
    Ok(format!("{} fixtures, {surfaces} surfaces", fixtures.len()))
}

fn genus_zero_counts(fixtures: &[Fixture]) -> Outcome {
    let mut checked = 0usize;
    for f in fixtures {
        for s in analyze(f)?.surfaces().filter(|s| s.genus == 0) {
            let c = s.classification;
            if c.m3 != 8 + c.m5 + 2 * c.m6 {
                return Err(format!("{} surface {}: {:?}", f.name, s.id, c));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} genus-0 surfaces"))
}

fn linear_scaling() -> Outcome {
    let samples = bench_boxes(&[64, 128, 256], 3).map_err(|e| e.to_string())?;
    let line = samples
        .iter()
        .map(|s| format!("{}^3 {:.3}s", s.side, s.seconds))
        .collect::<Vec<_>>()
        .join(", ");
    for w in samples.windows(2) {
        let ratio = w[1].seconds / w[0].seconds;
        if ratio > 12.0 {
            return Err(format!("{line}; ratio {ratio:.2} > 12"));
        }
    }
    let last = samples.last().unwrap();
    if last.seconds > 30.0 {
        return Err(format!("{line}; 256^3 over 30 s"));
    }
    Ok(line)
}

fn mesh_extension() -> Outcome {
    for (name, mesh, want) in [
        ("tetrahedron", TriMesh::tetrahedron(), 0),
        ("torus 8x8", TriMesh::torus(8, 8), 1),
    ] {
        let comps = mesh_genus(&mesh).map_err(|e| format!("{name}: {e}"))?;
        if comps.len() != 1 || comps[0].genus != want {
            return Err(format!("{name}: {comps:?}"));
        }
        let target = 2.0 * std::f64::consts::PI * comps[0].euler as f64;
        let err = (comps[0].angle_defect_total - target).abs();
        if err > 1e-6 * target.abs().max(1.0) {
            return Err(format!("{name}: angle defect off by {err:e}"));
        }
    }
    Ok("tetrahedron genus 0, torus genus 1".into())
}

fn manifold_validation(fixtures: &[Fixture]) -> Outcome {
    let pair = |b: [usize; 3]| {
        VoxelVolume::from_coords([2, 2, 2], [VoxelCoord::new(0, 0, 0), VoxelCoord::new(b[0], b[1], b[2])])
            .unwrap()
    };
    for (name, v, kind) in [
        ("edge-diagonal", pair([1, 1, 0]), ViolationKind::NonmanifoldEdge),
        ("corner-diagonal", pair([1, 1, 1]), ViolationKind::NonmanifoldVertex),
    ] {
        let found = validate_manifold(&v);
        if found.is_empty() || found.iter().any(|x| x.kind != kind) {
            return Err(format!("{name}: {found:?}"));
        }
    }
    for f in fixtures {
        let found = validate_manifold(&f.volume);
        if !found.is_empty() {
            return Err(format!("{}: {:?}", f.name, found[0]));
        }
    }
    Ok(format!("both diagonals rejected, {} fixtures accepted", fixtures.len()))
}

fn main() -> ExitCode {
    let mut fixtures = named_fixtures();
    fixtures.extend((0..RANDOM_FIXTURES).map(random_fixture));

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("surface point types of box and plates", Box::new(figure_two)),
        ("surface point types of handled U-shapes", Box::new(figure_three)),
        ("homology of solid torus and hollow box", Box::new(homology_groups)),
        ("oracle equivalence on random fixtures", Box::new(oracle_equivalence)),
        ("Euler identities", Box::new(|| euler_identities(&fixtures))),
        ("genus-0 point count relation", Box::new(|| genus_zero_counts(&fixtures))),
        ("linear scaling on solid cubes", Box::new(linear_scaling)),
        ("triangle-mesh genus", Box::new(mesh_extension)),
        ("manifold validation", Box::new(|| manifold_validation(&fixtures))),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
