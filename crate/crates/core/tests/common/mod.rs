//! Brute-force reference implementations used by the integration and
//! acceptance tests. They work from raw positions and indices and share no
//! code paths with the library algorithms they check.

#![allow(dead_code)]

use std::collections::BTreeSet;

use citymesh::fixtures::{self, CurvedFixture};
use citymesh::mesh::{Point, TriangleMesh, Vector};
use citymesh::segmentation::{SegmentMode, SegmentParams, CURVE_DOT_SLACK};
use citymesh::selection::PickRay;

pub const EPS_BAND: f64 = 1e-3;
pub const EPS_PLANAR: f64 = 1e-4;

pub fn corners(mesh: &TriangleMesh, f: usize) -> [Point; 3] {
    mesh.face(f).vertices().map(|v| mesh.vertices()[v as usize])
}

/// Unit normal from the right-hand rule on the stored winding.
pub fn normal(mesh: &TriangleMesh, f: usize) -> Vector {
    let [a, b, c] = corners(mesh, f);
    let (u, v) = (b - a, c - a);
    let n = Vector::new(u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x);
    n / (n.x * n.x + n.y * n.y + n.z * n.z).sqrt()
}

pub fn centroid(mesh: &TriangleMesh, f: usize) -> Point {
    let [a, b, c] = corners(mesh, f);
    Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0, (a.z + b.z + c.z) / 3.0)
}

pub fn bbox_diagonal(mesh: &TriangleMesh) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in mesh.vertices() {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt()
}

/// Face pairs sharing at least one vertex index, by all-pairs scan.
pub fn shared_index_edges(mesh: &TriangleMesh) -> BTreeSet<(usize, usize)> {
    let n = mesh.face_count();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let a = mesh.face(i).vertices();
            let b = mesh.face(j).vertices();
            if a.iter().any(|v| b.contains(v)) {
                edges.insert((i, j));
            }
        }
    }
    edges
}

/// Shared-index edges plus, for every vertex pair closer than `1/p`, the
/// edges between all faces incident to either vertex.
pub fn welded_edges(mesh: &TriangleMesh, p: f64) -> BTreeSet<(usize, usize)> {
    let mut edges = shared_index_edges(mesh);
    let threshold = 1.0 / p;
    let n = mesh.face_count();
    let verts = mesh.vertices();
    let incident = |v: usize| (0..n).filter(move |&f| mesh.face(f).vertices().contains(&(v as u32)));
    for u in 0..verts.len() {
        for v in u + 1..verts.len() {
            if (verts[u] - verts[v]).norm() < threshold {
                for fu in incident(u) {
                    for fv in incident(v) {
                        if fu != fv {
                            edges.insert((fu.min(fv), fu.max(fv)));
                        }
                    }
                }
            }
        }
    }
    edges
}

/// Union-find component count.
pub fn component_count(n: usize, edges: &BTreeSet<(usize, usize)>) -> usize {
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

/// Least fixed point: sweep the edge list in both directions, admitting
/// `i` from admitted `j` when `admit(j, i)`, until a sweep adds nothing.
pub fn closure(
    n: usize,
    edges: &BTreeSet<(usize, usize)>,
    seed: usize,
    admit: impl Fn(usize, usize) -> bool,
) -> BTreeSet<u32> {
    let mut inside = vec![false; n];
    inside[seed] = true;
    loop {
        let mut changed = false;
        for &(a, b) in edges {
            for (j, i) in [(a, b), (b, a)] {
                if inside[j] && !inside[i] && admit(j, i) {
                    inside[i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (0..n).filter(|&i| inside[i]).map(|i| i as u32).collect()
}

fn dot(a: &Vector, b: &Vector) -> f64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

/// Reference segmentation written directly from the predicate definitions.
pub fn segment_oracle(
    mesh: &TriangleMesh,
    edges: &BTreeSet<(usize, usize)>,
    mode: SegmentMode,
    seed: usize,
    w: f64,
    params: &SegmentParams,
) -> BTreeSet<u32> {
    let n = mesh.face_count();
    let normals: Vec<Vector> = (0..n).map(|f| normal(mesh, f)).collect();
    let ns = normals[seed];
    let normal_ok = |i: usize| (ns - normals[i]).norm() <= w;
    let anchor = corners(mesh, seed)[0];
    let tol = w * bbox_diagonal(mesh);
    let plane_ok = |i: usize| dot(&(centroid(mesh, i) - anchor), &ns).abs() <= tol;
    let filter = |pred: &dyn Fn(usize) -> bool| -> BTreeSet<u32> {
        (0..n).filter(|&i| i == seed || pred(i)).map(|i| i as u32).collect()
    };
    match mode {
        SegmentMode::Normal => filter(&normal_ok),
        SegmentMode::Coplanar => filter(&plane_ok),
        SegmentMode::Spatial => closure(n, edges, seed, |_, _| true),
        SegmentMode::NormalAndSpatial => closure(n, edges, seed, |_, i| normal_ok(i)),
        SegmentMode::SpatialCoplanar => closure(n, edges, seed, |_, i| plane_ok(i)),
        SegmentMode::Wall => {
            let up = mesh.up();
            let signed = |x: f64| if params.raw_wall_dots { x } else { x.abs() };
            let up_ok = |i: usize| signed(dot(up, &normals[i])) < 1.0 - w;
            if !up_ok(seed) {
                return BTreeSet::new();
            }
            closure(n, edges, seed, |_, i| {
                let d = signed(dot(&ns, &normals[i]));
                (d <= w || d >= 1.0 - w) && up_ok(i)
            })
        }
        SegmentMode::Curve => closure(n, edges, seed, |j, i| dot(&normals[j], &normals[i]) >= w - CURVE_DOT_SLACK),
        SegmentMode::Cylinder => {
            let (lo, hi) = params.band.unwrap_or((w, 1.0 - EPS_BAND));
            let eps = params.planar_epsilon.unwrap_or(EPS_PLANAR);
            closure(n, edges, seed, |j, i| {
                let d = dot(&normals[j], &normals[i]);
                (lo <= d && d <= hi) || d >= 1.0 - eps
            })
        }
    }
}

/// Möller–Trumbore intersection distance, hits at `t > 1e-9` only.
pub fn moller_trumbore(origin: &Point, dir: &Vector, tri: &[Point; 3]) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(&p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (t > 1e-9).then_some(t)
}

/// Nearest hit by exhaustive scan; ties resolve to the smaller index.
pub fn first_hit_oracle(mesh: &TriangleMesh, ray: &PickRay) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for f in 0..mesh.face_count() {
        if let Some(t) = moller_trumbore(ray.origin(), ray.direction(), &corners(mesh, f)) {
            match best {
                Some((bt, _)) if bt <= t => {}
                _ => best = Some((t, f)),
            }
        }
    }
    best.map(|(_, f)| f)
}

/// Named fixture with the graph edges the oracle should use and the weld
/// precision (if any) the library graph should be built with.
pub struct Fixture {
    pub name: &'static str,
    pub mesh: TriangleMesh,
    pub weld: Option<f64>,
}

impl Fixture {
    pub fn oracle_edges(&self) -> BTreeSet<(usize, usize)> {
        match self.weld {
            Some(p) => welded_edges(&self.mesh, p),
            None => shared_index_edges(&self.mesh),
        }
    }

    pub fn library_graph(&self) -> citymesh::FaceGraph {
        let base = citymesh::build_base_graph(&self.mesh);
        match self.weld {
            Some(p) => citymesh::weld_graph(&self.mesh, &base, p).unwrap(),
            None => base,
        }
    }
}

/// The acceptance fixture set: cube, welded cube pair, gabled house,
/// 16-gon prism and half-cylinder vault.
pub fn acceptance_fixtures() -> Vec<Fixture> {
    let CurvedFixture { mesh: prism, .. } = fixtures::prism(16);
    let CurvedFixture { mesh: vault, .. } = fixtures::half_cylinder_vault();
    vec![
        Fixture { name: "unit cube", mesh: fixtures::unit_cube(), weld: None },
        Fixture { name: "welded cube pair", mesh: fixtures::cube_pair(0.05), weld: Some(10.0) },
        Fixture { name: "gabled house", mesh: fixtures::gabled_house(30.0), weld: None },
        Fixture { name: "16-gon prism", mesh: prism, weld: None },
        Fixture { name: "half-cylinder vault", mesh: vault, weld: None },
    ]
}

/// Extra building-shaped fixtures for the integration suite.
pub fn building_fixtures() -> Vec<Fixture> {
    vec![
        Fixture { name: "box house", mesh: fixtures::box_house(), weld: None },
        Fixture { name: "L house", mesh: fixtures::l_house(), weld: None },
        Fixture { name: "stairs", mesh: fixtures::stairs(4), weld: None },
        Fixture { name: "house with chimney", mesh: fixtures::house_with_chimney(), weld: None },
        Fixture { name: "welded chimney", mesh: fixtures::house_with_chimney(), weld: Some(2.0) },
        Fixture { name: "sphere", mesh: fixtures::uv_sphere(8, 12), weld: None },
    ]
}

/// Weight range sampled for each mode in randomized trials.
pub fn sample_range(mode: SegmentMode) -> (f64, f64) {
    match mode {
        SegmentMode::Normal | SegmentMode::NormalAndSpatial => (0.0, 2.0),
        SegmentMode::Coplanar | SegmentMode::SpatialCoplanar => (0.0, 0.3),
        _ => (0.0, 1.0),
    }
}
