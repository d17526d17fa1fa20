//! Face selections, ray picking and set operators.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{Point, TriangleMesh, Vector};
use crate::segmentation::SegmentationRequest;

/// Hits closer than this along the ray are ignored so that a ray cast from
/// a point on a surface does not report that surface.
pub const MIN_HIT_DISTANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("selections belong to different meshes ({0} vs {1} faces)")]
    MeshMismatch(usize, usize),
    #[error("face index {index} out of range for mesh with {count} faces")]
    FaceOutOfRange { index: u32, count: usize },
    #[error("ray direction must be finite and non-zero")]
    InvalidRay,
    #[error("paint stroke needs at least one ray")]
    EmptyStroke,
}

/// Where a selection came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Provenance {
    #[default]
    Manual,
    Segmentation { request: SegmentationRequest },
}

/// A set of face indices over a mesh with a known face count.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    faces: BTreeSet<u32>,
    face_count: usize,
    provenance: Provenance,
}

impl Selection {
    pub fn empty(face_count: usize) -> Self {
        Selection {
            faces: BTreeSet::new(),
            face_count,
            provenance: Provenance::Manual,
        }
    }

    pub fn all(face_count: usize) -> Self {
        Selection {
            faces: (0..face_count as u32).collect(),
            face_count,
            provenance: Provenance::Manual,
        }
    }

    pub fn from_faces(
        face_count: usize,
        faces: impl IntoIterator<Item = u32>,
    ) -> Result<Self, SelectionError> {
        let faces: BTreeSet<u32> = faces.into_iter().collect();
        if let Some(&index) = faces.iter().next_back().filter(|&&i| i as usize >= face_count) {
            return Err(SelectionError::FaceOutOfRange {
                index,
                count: face_count,
            });
        }
        Ok(Selection {
            faces,
            face_count,
            provenance: Provenance::Manual,
        })
    }

    pub(crate) fn from_set(face_count: usize, faces: BTreeSet<u32>, provenance: Provenance) -> Self {
        debug_assert!(faces.iter().all(|&f| (f as usize) < face_count));
        Selection {
            faces,
            face_count,
            provenance,
        }
    }

    pub fn faces(&self) -> &BTreeSet<u32> {
        &self.faces
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.faces.iter().copied().collect()
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains(&self, face: u32) -> bool {
        self.faces.contains(&face)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn invert(&self) -> Self {
        Selection {
            faces: (0..self.face_count as u32)
                .filter(|f| !self.faces.contains(f))
                .collect(),
            face_count: self.face_count,
            provenance: Provenance::Manual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SetOp {
    Union,
    Difference,
    Intersection,
}

/// Set combination of two selections over the same mesh.
pub fn combine(a: &Selection, b: &Selection, op: SetOp) -> Result<Selection, SelectionError> {
    if a.face_count != b.face_count {
        return Err(SelectionError::MeshMismatch(a.face_count, b.face_count));
    }
    let faces = match op {
        SetOp::Union => a.faces.union(&b.faces).copied().collect(),
        SetOp::Difference => a.faces.difference(&b.faces).copied().collect(),
        SetOp::Intersection => a.faces.intersection(&b.faces).copied().collect(),
    };
    Ok(Selection::from_set(a.face_count, faces, Provenance::Manual))
}

/// World-space pick ray with a unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PickRay {
    origin: Point,
    direction: Vector,
}

impl PickRay {
    /// Normalizes `direction`.
    pub fn new(origin: Point, direction: Vector) -> Result<Self, SelectionError> {
        let len = direction.norm();
        if !len.is_finite() || len == 0.0 || !origin.iter().all(|c| c.is_finite()) {
            return Err(SelectionError::InvalidRay);
        }
        Ok(PickRay {
            origin,
            direction: direction / len,
        })
    }

    pub fn origin(&self) -> &Point {
        &self.origin
    }

    pub fn direction(&self) -> &Vector {
        &self.direction
    }

    pub fn at(&self, t: f64) -> Point {
        self.origin + self.direction * t
    }
}

fn max_dimension(v: &Vector) -> usize {
    let a = v.abs();
    if a.x > a.y {
        if a.x > a.z {
            0
        } else {
            2
        }
    } else if a.y > a.z {
        1
    } else {
        2
    }
}

/// Watertight ray/triangle intersection (Woop, Benthin & Wald). Returns the
/// ray parameter of the hit. Rays passing exactly through a shared edge or
/// vertex hit at least one of the adjacent triangles.
pub fn intersect_triangle(ray: &PickRay, tri: &[Point; 3]) -> Option<f64> {
    let d = ray.direction;
    let kz = max_dimension(&d);
    let mut kx = (kz + 1) % 3;
    let mut ky = (kx + 1) % 3;
    if d[kz] < 0.0 {
        std::mem::swap(&mut kx, &mut ky);
    }
    let sx = d[kx] / d[kz];
    let sy = d[ky] / d[kz];
    let sz = 1.0 / d[kz];

    let rel = tri.map(|p| p - ray.origin);
    let shear = |v: &Vector| (v[kx] - sx * v[kz], v[ky] - sy * v[kz], sz * v[kz]);
    let (ax, ay, az) = shear(&rel[0]);
    let (bx, by, bz) = shear(&rel[1]);
    let (cx, cy, cz) = shear(&rel[2]);

    let u = cx * by - cy * bx;
    let v = ax * cy - ay * cx;
    let w = bx * ay - by * ax;
    if (u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0) {
        return None;
    }
    let det = u + v + w;
    if det == 0.0 {
        return None;
    }
    let t = (u * az + v * bz + w * cz) / det;
    (t.is_finite() && t > MIN_HIT_DISTANCE).then_some(t)
}

/// Nearest face hit by `ray`; ties on distance go to the smaller index.
/// Back faces count.
pub fn pick_first_hit(mesh: &TriangleMesh, ray: &PickRay) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for face in 0..mesh.face_count() {
        if let Some(t) = intersect_triangle(ray, &mesh.triangle(face)) {
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, face));
            }
        }
    }
    best.map(|(_, f)| f)
}

/// Adds (or with `erase`, removes) the first hit of every ray.
pub fn paint_stroke(
    mesh: &TriangleMesh,
    rays: &[PickRay],
    erase: bool,
    current: &Selection,
) -> Result<Selection, SelectionError> {
    if rays.is_empty() {
        return Err(SelectionError::EmptyStroke);
    }
    if current.face_count != mesh.face_count() {
        return Err(SelectionError::MeshMismatch(current.face_count, mesh.face_count()));
    }
    let mut faces = current.faces.clone();
    for hit in rays.iter().filter_map(|r| pick_first_hit(mesh, r)) {
        if erase {
            faces.remove(&(hit as u32));
        } else {
            faces.insert(hit as u32);
        }
    }
    Ok(Selection::from_set(mesh.face_count(), faces, Provenance::Manual))
}
