//! Genus of closed triangle meshes.
//!
//! The genus of each connected component comes from its exact combinatorial
//! Euler characteristic `V − E + F`. The summed angle defect
//! `Σ_v (2π − Σ θ)` is computed alongside and must agree with `2πχ`; a
//! disagreement means the input is not the closed surface it claims to be.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("OFF line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("triangle {triangle} references vertex {index}, mesh has {vertex_count}")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("triangle {0} is degenerate (repeated vertex or zero area)")]
    Degenerate(usize),
    #[error("edge ({0}, {1}) lies in {2} triangles; a closed surface needs exactly 2")]
    OpenEdge(usize, usize, usize),
    #[error("component {component} has odd Euler characteristic {euler}")]
    OddEuler { component: usize, euler: i64 },
    #[error("component {component} has Euler characteristic {euler} > 2")]
    NegativeGenus { component: usize, euler: i64 },
    #[error(
        "component {component}: angle defect total {total} disagrees with 2πχ = {expected}"
    )]
    AngleDefectMismatch {
        component: usize,
        total: f64,
        expected: f64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Indexed triangle mesh.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

/// Genus and Gauss-Bonnet data for one edge-connected mesh component.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentGenus {
    pub component: usize,
    pub genus: u32,
    pub euler: i64,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    /// `Σ_v (2π − Σ θ)` over the component's vertices, in radians.
    pub angle_defect_total: f64,
}

impl TriMesh {
    /// Appends `other`, reindexing its triangles.
    pub fn append(&mut self, other: &TriMesh) {
        let base = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles
            .extend(other.triangles.iter().map(|t| t.map(|i| i + base)));
    }

    pub fn scaled(&self, factor: f64) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|p| p.map(|c| c * factor)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Regular tetrahedron inscribed in the cube `[-1, 1]³`.
    pub fn tetrahedron() -> TriMesh {
        TriMesh {
            vertices: vec![
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ],
            triangles: vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
        }
    }

    /// `n × m` grid on a torus of revolution (radii 2 and 1), each grid
    /// square split into two triangles.
    pub fn torus(n: usize, m: usize) -> TriMesh {
        assert!(n >= 3 && m >= 3, "torus grid needs at least 3x3 cells");
        let (major, minor) = (2.0, 1.0);
        let mut vertices = Vec::with_capacity(n * m);
        for i in 0..n {
            let u = TAU * i as f64 / n as f64;
            for j in 0..m {
                let w = TAU * j as f64 / m as f64;
                let r = major + minor * w.cos();
                vertices.push([r * u.cos(), r * u.sin(), minor * w.sin()]);
            }
        }
        let id = |i: usize, j: usize| (i % n) * m + (j % m);
        let mut triangles = Vec::with_capacity(2 * n * m);
        for i in 0..n {
            for j in 0..m {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        TriMesh { vertices, triangles }
    }
}

pub fn parse_off(text: &str) -> Result<TriMesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: String| MeshError::Parse { line, message };

    match lines.next() {
        Some((_, "OFF")) => {}
        Some((n, l)) => return Err(err(n, format!("expected \"OFF\" header, got {l:?}"))),
        None => return Err(err(1, "empty file".into())),
    }
    let (n, counts) = lines.next().ok_or_else(|| err(2, "missing counts line".into()))?;
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(n, format!("bad count {t:?}"))))
        .collect::<Result<_, _>>()?;
    let [nv, nf] = match counts[..] {
        [v, f] | [v, f, _] => [v, f],
        _ => return Err(err(n, "expected \"<V> <F> <E>\"".into())),
    };

    let mut mesh = TriMesh::default();
    for _ in 0..nv {
        let (n, l) = lines
            .next()
            .ok_or_else(|| err(0, format!("expected {nv} vertices, file ended early")))?;
        let xyz: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(n, format!("bad coordinate {t:?}"))))
            .collect::<Result<_, _>>()?;
        match xyz[..] {
            [x, y, z] => mesh.vertices.push([x, y, z]),
            _ => return Err(err(n, "vertex needs three coordinates".into())),
        }
    }
    for _ in 0..nf {
        let (n, l) = lines
            .next()
            .ok_or_else(|| err(0, format!("expected {nf} faces, file ended early")))?;
        let idx: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(n, format!("bad index {t:?}"))))
            .collect::<Result<_, _>>()?;
        match idx[..] {
            [3, i, j, k] => mesh.triangles.push([i, j, k]),
            [k, ..] if k != 3 => return Err(err(n, format!("face has {k} vertices, only triangles are supported"))),
            _ => return Err(err(n, "face needs \"3 i j k\"".into())),
        }
    }
    if let Some((n, _)) = lines.next() {
        return Err(err(n, "unexpected trailing content".into()));
    }
    Ok(mesh)
}

pub fn load_off(path: impl AsRef<Path>) -> Result<TriMesh, MeshError> {
    parse_off(&std::fs::read_to_string(path)?)
}

pub fn to_off(mesh: &TriMesh) -> String {
    use std::fmt::Write as _;
    let mut out = format!("OFF\n{} {} 0\n", mesh.vertices.len(), mesh.triangles.len());
    for [x, y, z] in &mesh.vertices {
        let _ = writeln!(out, "{x} {y} {z}");
    }
    for [i, j, k] in &mesh.triangles {
        let _ = writeln!(out, "3 {i} {j} {k}");
    }
    out
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Interior angle at `apex` of the triangle `(apex, b, c)`.
fn angle(apex: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let (u, v) = (sub(b, apex), sub(c, apex));
    norm(cross(u, v)).atan2(dot(u, v))
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Genus of every edge-connected component of a closed triangle mesh,
/// numbered by their lowest triangle index.
pub fn mesh_genus(mesh: &TriMesh) -> Result<Vec<ComponentGenus>, MeshError> {
    let nv = mesh.vertices.len();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if let Some(&index) = tri.iter().find(|&&i| i >= nv) {
            return Err(MeshError::IndexOutOfRange {
                triangle: t,
                index,
                vertex_count: nv,
            });
        }
        let [a, b, c] = tri.map(|i| mesh.vertices[i]);
        let area2 = norm(cross(sub(b, a), sub(c, a)));
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] || !(area2 > 0.0) {
            return Err(MeshError::Degenerate(t));
        }
    }

    let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edges.entry((a.min(b), a.max(b))).or_default().push(t);
        }
    }
    let mut parent: Vec<usize> = (0..mesh.triangles.len()).collect();
    let mut sorted_edges: Vec<_> = edges.into_iter().collect();
    sorted_edges.sort_unstable_by_key(|(e, _)| *e);
    for ((a, b), tris) in &sorted_edges {
        if tris.len() != 2 {
            return Err(MeshError::OpenEdge(*a, *b, tris.len()));
        }
        let (r0, r1) = (find(&mut parent, tris[0]), find(&mut parent, tris[1]));
        if r0 != r1 {
            parent[r0.max(r1)] = r0.min(r1);
        }
    }

    // Component ids in order of first triangle.
    let mut component_of_root = HashMap::new();
    let mut component = vec![0; mesh.triangles.len()];
    for t in 0..mesh.triangles.len() {
        let r = find(&mut parent, t);
        let next = component_of_root.len();
        component[t] = *component_of_root.entry(r).or_insert(next);
    }
    let count = component_of_root.len();

    let mut faces = vec![0usize; count];
    let mut edge_counts = vec![0usize; count];
    let mut defect: Vec<HashMap<usize, f64>> = vec![HashMap::new(); count];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let c = component[t];
        faces[c] += 1;
        let p = tri.map(|i| mesh.vertices[i]);
        for k in 0..3 {
            let theta = angle(p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
            *defect[c].entry(tri[k]).or_insert(TAU) -= theta;
        }
    }
    for ((_, _), tris) in &sorted_edges {
        edge_counts[component[tris[0]]] += 1;
    }

    let mut out = Vec::with_capacity(count);
    for c in 0..count {
        let vertices = defect[c].len();
        let euler = vertices as i64 - edge_counts[c] as i64 + faces[c] as i64;
        if euler % 2 != 0 {
            return Err(MeshError::OddEuler { component: c, euler });
        }
        if euler > 2 {
            return Err(MeshError::NegativeGenus { component: c, euler });
        }
        let total: f64 = defect[c].values().sum();
        let expected = TAU * euler as f64;
        if (total - expected).abs() > 1e-6 * (1.0 + expected.abs()) {
            return Err(MeshError::AngleDefectMismatch {
                component: c,
                total,
                expected,
            });
        }
        out.push(ComponentGenus {
            component: c,
            genus: ((2 - euler) / 2) as u32,
            euler,
            vertices,
            edges: edge_counts[c],
            faces: faces[c],
            angle_defect_total: total,
        });
    }
    Ok(out)
}
