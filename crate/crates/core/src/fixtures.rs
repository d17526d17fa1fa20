//! Small synthetic building shapes.
//!
//! All meshes have outward-facing windings, use +Z as up and stay well under
//! a thousand faces. They back the examples and test suites.

use std::f64::consts::PI;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::{Point, TriangleMesh};

/// Incremental polygon-soup builder with fan triangulation.
#[derive(Debug, Default, Clone)]
pub struct MeshBuilder {
    vertices: Vec<Point>,
    triangles: Vec<[u32; 3]>,
}

impl MeshBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, x: f64, y: f64, z: f64) -> u32 {
        self.vertices.push(Point::new(x, y, z));
        (self.vertices.len() - 1) as u32
    }

    /// Fan-triangulates `corners` from the first corner. Returns the range
    /// of face indices produced.
    pub fn polygon(&mut self, corners: &[u32]) -> Range<u32> {
        let start = self.triangles.len() as u32;
        for k in 1..corners.len() - 1 {
            self.triangles.push([corners[0], corners[k], corners[k + 1]]);
        }
        start..self.triangles.len() as u32
    }

    /// Axis-aligned box with its own eight vertices.
    pub fn cuboid(&mut self, min: [f64; 3], max: [f64; 3]) -> Range<u32> {
        let [x0, y0, z0] = min;
        let [x1, y1, z1] = max;
        let v = [
            self.vertex(x0, y0, z0),
            self.vertex(x1, y0, z0),
            self.vertex(x1, y1, z0),
            self.vertex(x0, y1, z0),
            self.vertex(x0, y0, z1),
            self.vertex(x1, y0, z1),
            self.vertex(x1, y1, z1),
            self.vertex(x0, y1, z1),
        ];
        let start = self.triangles.len() as u32;
        for quad in [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]] {
            self.polygon(&quad.map(|i| v[i]));
        }
        start..self.triangles.len() as u32
    }

    pub fn face_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn build(self) -> TriangleMesh {
        let mesh = TriangleMesh::from_triangles(self.vertices, &self.triangles)
            .expect("fixture indices are valid");
        assert_eq!(mesh.dropped_degenerate(), 0, "fixture produced a degenerate triangle");
        mesh
    }
}

/// `[0,1]³` as six quads: 8 vertices, 12 triangles.
pub fn unit_cube() -> TriangleMesh {
    let mut b = MeshBuilder::new();
    b.cuboid([0.; 3], [1.; 3]);
    b.build()
}

/// `[-0.5,0.5]³`.
pub fn centered_cube() -> TriangleMesh {
    let mut b = MeshBuilder::new();
    b.cuboid([-0.5; 3], [0.5; 3]);
    b.build()
}

/// Two unit cubes along X whose facing walls are `gap` apart. They share no
/// vertices.
pub fn cube_pair(gap: f64) -> TriangleMesh {
    let mut b = MeshBuilder::new();
    b.cuboid([0.; 3], [1.; 3]);
    b.cuboid([1. + gap, 0., 0.], [2. + gap, 1., 1.]);
    b.build()
}

/// Box house `10 × 8 × 6`: four walls, flat roof, floor (12 triangles).
pub fn box_house() -> TriangleMesh {
    let mut b = MeshBuilder::new();
    b.cuboid([0., 0., 0.], [10., 8., 6.]);
    b.build()
}

/// Box house with a separate chimney box standing on the roof. The chimney
/// shares no vertices with the house.
pub fn house_with_chimney() -> TriangleMesh {
    let mut b = MeshBuilder::new();
    b.cuboid([0., 0., 0.], [10., 8., 6.]);
    b.cuboid([2., 2., 6.], [3., 3., 8.]);
    b.build()
}

/// `nx × ny` unit quads in the `z = 0` plane, two triangles each.
pub fn flat_grid(nx: usize, ny: usize) -> TriangleMesh {
    let mut b = MeshBuilder::new();
    grid_into(&mut b, nx, ny, 0.0);
    b.build()
}

fn grid_into(b: &mut MeshBuilder, nx: usize, ny: usize, x_offset: f64) {
    let base = b.vertices.len() as u32;
    for j in 0..=ny {
        for i in 0..=nx {
            b.vertex(x_offset + i as f64, j as f64, 0.0);
        }
    }
    let idx = |i: usize, j: usize| base + (j * (nx + 1) + i) as u32;
    for j in 0..ny {
        for i in 0..nx {
            b.polygon(&[idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
}

/// Two disjoint 2×2 plates in the same plane, one unit apart.
pub fn coplanar_plates() -> TriangleMesh {
    let mut b = MeshBuilder::new();
    grid_into(&mut b, 2, 2, 0.0);
    grid_into(&mut b, 2, 2, 3.0);
    b.build()
}

/// A single triangle with coordinates taken from a real building export.
pub fn single_triangle() -> TriangleMesh {
    let mut b = MeshBuilder::new();
    let v = [
        b.vertex(-124.189, -258.724, 12.0),
        b.vertex(-119.199, -258.724, 16.99),
        b.vertex(-91.232, -258.724, 12.0),
    ];
    b.polygon(&v);
    b.build()
}

/// Gabled house `10 × 8`, eaves at 5, ridge along X, roof slopes pitched
/// `pitch_deg` from horizontal. 16 triangles.
pub fn gabled_house(pitch_deg: f64) -> TriangleMesh {
    let (w, d, h) = (10.0, 8.0, 5.0);
    let ridge = h + 0.5 * d * pitch_deg.to_radians().tan();
    let mut b = MeshBuilder::new();
    let v = [
        b.vertex(0., 0., 0.),
        b.vertex(w, 0., 0.),
        b.vertex(w, d, 0.),
        b.vertex(0., d, 0.),
        b.vertex(0., 0., h),
        b.vertex(w, 0., h),
        b.vertex(w, d, h),
        b.vertex(0., d, h),
        b.vertex(0., 0.5 * d, ridge),
        b.vertex(w, 0.5 * d, ridge),
    ];
    for poly in [
        &[0, 3, 2, 1][..],
        &[0, 1, 5, 4],
        &[2, 3, 7, 6],
        &[0, 4, 8, 7, 3],
        &[1, 2, 6, 9, 5],
        &[4, 5, 9, 8],
        &[6, 7, 8, 9],
    ] {
        let corners: Vec<u32> = poly.iter().map(|&i| v[i]).collect();
        b.polygon(&corners);
    }
    b.build()
}

/// L-shaped footprint extruded to height 3.
pub fn l_house() -> TriangleMesh {
    let footprint = [(0., 0.), (10., 0.), (10., 5.), (5., 5.), (5., 10.), (0., 10.)];
    let height = 3.0;
    let mut b = MeshBuilder::new();
    let bottom: Vec<u32> = footprint.iter().map(|&(x, y)| b.vertex(x, y, 0.)).collect();
    let top: Vec<u32> = footprint.iter().map(|&(x, y)| b.vertex(x, y, height)).collect();
    let n = footprint.len();
    for i in 0..n {
        let j = (i + 1) % n;
        b.polygon(&[bottom[i], bottom[j], top[j], top[i]]);
    }
    b.polygon(&top);
    let mut floor = vec![bottom[0]];
    floor.extend(bottom[1..].iter().rev());
    b.polygon(&floor);
    b.build()
}

/// Open staircase: `steps` risers (normal −X) and treads (normal +Z), one
/// unit deep and 0.5 high, 2 wide.
pub fn stairs(steps: usize) -> TriangleMesh {
    let (depth, rise, width) = (1.0, 0.5, 2.0);
    let mut profile = vec![(0.0, 0.0)];
    for k in 0..steps {
        let x = k as f64 * depth;
        let z = (k + 1) as f64 * rise;
        profile.push((x, z));
        profile.push((x + depth, z));
    }
    let mut b = MeshBuilder::new();
    let near: Vec<u32> = profile.iter().map(|&(x, z)| b.vertex(x, 0., z)).collect();
    let far: Vec<u32> = profile.iter().map(|&(x, z)| b.vertex(x, width, z)).collect();
    for k in 0..profile.len() - 1 {
        b.polygon(&[near[k], near[k + 1], far[k + 1], far[k]]);
    }
    b.build()
}

/// A faceted solid with its curved faces identified.
#[derive(Debug, Clone)]
pub struct CurvedFixture {
    pub mesh: TriangleMesh,
    /// Faces of the faceted curved surface, ascending.
    pub curved: Vec<u32>,
    /// Everything else (caps, floor), ascending.
    pub flat: Vec<u32>,
}

/// Regular `segments`-gon prism of radius 1 and height 2. Lateral quads are
/// split into two triangles; both caps are fanned.
pub fn prism(segments: usize) -> CurvedFixture {
    let mut b = MeshBuilder::new();
    let ring = |b: &mut MeshBuilder, z: f64| -> Vec<u32> {
        (0..segments)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / segments as f64;
                b.vertex(a.cos(), a.sin(), z)
            })
            .collect()
    };
    let bottom = ring(&mut b, 0.0);
    let top = ring(&mut b, 2.0);
    for k in 0..segments {
        let j = (k + 1) % segments;
        b.polygon(&[bottom[k], bottom[j], top[j], top[k]]);
    }
    let lateral_end = b.face_count() as u32;
    b.polygon(&top);
    let mut rev = vec![bottom[0]];
    rev.extend(bottom[1..].iter().rev());
    b.polygon(&rev);
    let total = b.face_count() as u32;
    CurvedFixture {
        mesh: b.build(),
        curved: (0..lateral_end).collect(),
        flat: (lateral_end..total).collect(),
    }
}

/// Half of a 16-gon cylinder (8 facets, 22.5° apart) of radius 1 spanning
/// 4 units along Y, closed by two half-disc end caps and a rectangular
/// floor.
pub fn half_cylinder_vault() -> CurvedFixture {
    let facets = 8;
    let length = 4.0;
    let mut b = MeshBuilder::new();
    let ring = |b: &mut MeshBuilder, y: f64| -> Vec<u32> {
        (0..=facets)
            .map(|k| {
                let a = PI * k as f64 / facets as f64;
                // exact springline points keep the floor planar
                let (s, c) = match k {
                    0 => (0.0, 1.0),
                    k if k == facets => (0.0, -1.0),
                    _ => a.sin_cos(),
                };
                b.vertex(c, y, s)
            })
            .collect()
    };
    let front = ring(&mut b, 0.0);
    let back = ring(&mut b, length);
    for k in 0..facets {
        b.polygon(&[front[k], back[k], back[k + 1], front[k + 1]]);
    }
    let curved_end = b.face_count() as u32;
    b.polygon(&front);
    let rev: Vec<u32> = back.iter().rev().copied().collect();
    b.polygon(&rev);
    b.polygon(&[front[0], front[facets], back[facets], back[0]]);
    let total = b.face_count() as u32;
    CurvedFixture {
        mesh: b.build(),
        curved: (0..curved_end).collect(),
        flat: (curved_end..total).collect(),
    }
}

/// UV sphere of radius 1.
pub fn uv_sphere(rings: usize, sectors: usize) -> TriangleMesh {
    let mut b = MeshBuilder::new();
    let north = b.vertex(0., 0., 1.);
    let mut bands = Vec::new();
    for r in 1..rings {
        let phi = PI * r as f64 / rings as f64;
        let band: Vec<u32> = (0..sectors)
            .map(|s| {
                let theta = 2.0 * PI * s as f64 / sectors as f64;
                b.vertex(phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos())
            })
            .collect();
        bands.push(band);
    }
    let south = b.vertex(0., 0., -1.);
    for s in 0..sectors {
        let t = (s + 1) % sectors;
        b.polygon(&[north, bands[0][s], bands[0][t]]);
        for r in 0..bands.len() - 1 {
            b.polygon(&[bands[r][s], bands[r + 1][s], bands[r + 1][t], bands[r][t]]);
        }
        let last = &bands[bands.len() - 1];
        b.polygon(&[south, last[t], last[s]]);
    }
    b.build()
}

/// `count` independent random triangles inside `[-1, 1]³` (seeded).
pub fn random_soup(count: usize, seed: u64) -> TriangleMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = MeshBuilder::new();
    while b.face_count() < count {
        let c = [rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)];
        let mut corner = || {
            b.vertex(
                c[0] + rng.gen_range(-0.2..0.2),
                c[1] + rng.gen_range(-0.2..0.2),
                c[2] + rng.gen_range(-0.2..0.2),
            )
        };
        let tri = [corner(), corner(), corner()];
        b.polygon(&tri);
    }
    TriangleMesh::from_triangles(b.vertices, &b.triangles).expect("valid indices")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Vector;

    /// Signed volume via the divergence theorem; positive for outward windings.
    fn volume(mesh: &TriangleMesh) -> f64 {
        (0..mesh.face_count())
            .map(|i| {
                let [a, b, c] = mesh.triangle(i);
                a.coords.dot(&b.coords.cross(&c.coords)) / 6.0
            })
            .sum()
    }

    #[test]
    fn closed_fixtures_are_outward() {
        assert!((volume(&unit_cube()) - 1.0).abs() < 1e-12);
        assert!((volume(&box_house()) - 480.0).abs() < 1e-9);
        assert!((volume(&l_house()) - 225.0).abs() < 1e-9);
        assert!(volume(&gabled_house(30.0)) > 400.0);
        assert!(volume(&prism(16).mesh) > 0.0);
        assert!(volume(&half_cylinder_vault().mesh) > 0.0);
        assert!(volume(&uv_sphere(8, 12)) > 0.0);
    }

    #[test]
    fn fixture_sizes() {
        assert_eq!(unit_cube().face_count(), 12);
        assert_eq!(cube_pair(0.1).face_count(), 24);
        assert_eq!(gabled_house(30.0).face_count(), 16);
        let p = prism(16);
        assert_eq!((p.curved.len(), p.flat.len()), (32, 28));
        let v = half_cylinder_vault();
        assert_eq!((v.curved.len(), v.flat.len()), (16, 16));
        assert_eq!(random_soup(200, 1).face_count(), 200);
        assert_eq!(stairs(3).face_count(), 12);
    }

    #[test]
    fn vault_facets_are_22_5_degrees_apart() {
        let v = half_cylinder_vault();
        let n0 = v.mesh.face(v.curved[0] as usize).normal();
        let n1 = v.mesh.face(v.curved[2] as usize).normal();
        assert!((n0.dot(n1) - (22.5f64).to_radians().cos()).abs() < 1e-12);
        let floor = v.mesh.face(*v.flat.last().unwrap() as usize).normal();
        assert_eq!(floor, &-Vector::z());
    }
}
