//! Indexed triangle meshes with per-face normals and centroids.

use nalgebra::{Point3, Vector3};
use thiserror::Error;

pub type Point = Point3<f64>;
pub type Vector = Vector3<f64>;

/// A triangle is dropped at construction when its area falls below this
/// fraction of the squared bounding-box diagonal.
pub const DEGENERATE_AREA_FACTOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("vertex {index} has a non-finite coordinate")]
    NonFiniteVertex { index: usize },
    #[error("triangle {triangle} references vertex {vertex}, but the mesh has {count} vertices")]
    VertexOutOfRange {
        triangle: usize,
        vertex: u32,
        count: usize,
    },
    #[error("degenerate face: points are coincident or collinear")]
    DegenerateFace,
    #[error("up vector must be finite and non-zero")]
    InvalidUpVector,
}

/// Unit normal of the triangle `(a, b, c)` following the right-hand rule.
pub fn face_normal(a: &Point, b: &Point, c: &Point) -> Result<Vector, MeshError> {
    let ab = b - a;
    let ac = c - a;
    let cross = ab.cross(&ac);
    let len = cross.norm();
    // sin(angle) at `a` must be resolvable in f64
    if !len.is_finite() || len == 0.0 || len <= f64::EPSILON * ab.norm() * ac.norm() {
        return Err(MeshError::DegenerateFace);
    }
    Ok(cross / len)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleFace {
    vertices: [u32; 3],
    normal: Vector,
    centroid: Point,
}

impl TriangleFace {
    pub fn vertices(&self) -> [u32; 3] {
        self.vertices
    }

    /// Unit normal derived from the winding order.
    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn centroid(&self) -> &Point {
        &self.centroid
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.vertices.contains(&v)
    }
}

/// Axis-aligned bounds of a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn of<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        Some(it.fold(
            Bounds {
                min: first,
                max: first,
            },
            |b, p| Bounds {
                min: b.min.inf(p),
                max: b.max.sup(p),
            },
        ))
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }
}

/// Immutable triangle mesh. Every face has a well-defined unit normal;
/// degenerate input triangles are dropped during construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point>,
    faces: Vec<TriangleFace>,
    up: Vector,
    diagonal: f64,
    dropped_degenerate: usize,
}

impl TriangleMesh {
    /// Builds a mesh from vertex positions and index triples.
    ///
    /// Triangles with repeated indices or with an area below
    /// `DEGENERATE_AREA_FACTOR * diagonal²` are dropped and counted in
    /// [`dropped_degenerate`](Self::dropped_degenerate).
    pub fn from_triangles(vertices: Vec<Point>, triangles: &[[u32; 3]]) -> Result<Self, MeshError> {
        if let Some(index) = vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(MeshError::NonFiniteVertex { index });
        }
        let diagonal = Bounds::of(&vertices).map_or(0.0, |b| b.diagonal());
        let min_area = DEGENERATE_AREA_FACTOR * diagonal * diagonal;

        let mut faces = Vec::with_capacity(triangles.len());
        let mut dropped = 0;
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v as usize >= vertices.len() {
                    return Err(MeshError::VertexOutOfRange {
                        triangle: t,
                        vertex: v,
                        count: vertices.len(),
                    });
                }
            }
            let [a, b, c] = tri.map(|i| vertices[i as usize]);
            let area = 0.5 * (b - a).cross(&(c - a)).norm();
            let distinct = tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2];
            match face_normal(&a, &b, &c) {
                Ok(normal) if distinct && area >= min_area => faces.push(TriangleFace {
                    vertices: *tri,
                    normal,
                    centroid: Point::from((a.coords + b.coords + c.coords) / 3.0),
                }),
                _ => dropped += 1,
            }
        }
        if dropped > 0 {
            log::warn!("dropped {dropped} degenerate triangle(s)");
        }

        Ok(TriangleMesh {
            vertices,
            faces,
            up: Vector::z(),
            diagonal,
            dropped_degenerate: dropped,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn faces(&self) -> &[TriangleFace] {
        &self.faces
    }

    pub fn face(&self, index: usize) -> &TriangleFace {
        &self.faces[index]
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Number of input triangles discarded as degenerate.
    pub fn dropped_degenerate(&self) -> usize {
        self.dropped_degenerate
    }

    pub fn up(&self) -> &Vector {
        &self.up
    }

    /// Replaces the up vector (normalized). Geometry is untouched.
    pub fn set_up(&mut self, up: Vector) -> Result<(), MeshError> {
        let len = up.norm();
        if !len.is_finite() || len == 0.0 {
            return Err(MeshError::InvalidUpVector);
        }
        self.up = up / len;
        Ok(())
    }

    pub fn with_up(mut self, up: Vector) -> Result<Self, MeshError> {
        self.set_up(up)?;
        Ok(self)
    }

    /// Bounding-box diagonal of all vertices.
    pub fn diagonal(&self) -> f64 {
        self.diagonal
    }

    pub fn bounds(&self) -> Option<Bounds> {
        Bounds::of(&self.vertices)
    }

    pub fn triangle(&self, face: usize) -> [Point; 3] {
        self.faces[face].vertices.map(|v| self.vertices[v as usize])
    }
}
