//! Seeded segmentation of triangle meshes.
//!
//! Every mode starts from a user-chosen seed face and a weight `w`:
//!
//! | mode | admitted faces |
//! |------|----------------|
//! | `Normal` | `‖N_s − N_i‖ ≤ w`, anywhere in the mesh |
//! | `Spatial` | graph component of the seed |
//! | `NormalAndSpatial` | normal test, reachable through admitted faces |
//! | `Coplanar` | centroid within `w · L` of the seed plane, anywhere |
//! | `SpatialCoplanar` | coplanar test, reachable through admitted faces |
//! | `Wall` | normal parallel/perpendicular to the seed and not along UP |
//! | `Curve` | `N_j · N_i ≥ w` against the neighbor `j` it was reached from |
//! | `Cylinder` | `N_j · N_i` inside a band, or a coplanar step |
//!
//! Traversal modes compute the least fixed point of their admission rule:
//! a face is admitted once any already-admitted neighbor lets it in, and
//! that never changes afterwards. The result does not depend on the order
//! in which neighbors are visited.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::FaceGraph;
use crate::mesh::TriangleMesh;
use crate::selection::{Provenance, Selection};

/// Default upper-band margin for cylinder traversal: band is `[w, 1 − 1e-3]`.
pub const DEFAULT_BAND_EPSILON: f64 = 1e-3;
/// Steps with `N_j · N_i ≥ 1 − 1e-4` always pass cylinder traversal.
pub const DEFAULT_PLANAR_EPSILON: f64 = 1e-4;
/// Slack on curve comparisons so that triangles split from one planar quad
/// stay connected at `w = 1` despite round-off in their normals.
pub const CURVE_DOT_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentError {
    #[error("seed face {seed} out of range for mesh with {count} faces")]
    SeedOutOfRange { seed: usize, count: usize },
    #[error("weight {weight} outside [{min}, {max}] for {mode:?} segmentation")]
    WeightOutOfRange {
        mode: SegmentMode,
        weight: f64,
        min: f64,
        max: f64,
    },
    #[error("invalid cylinder band [{lo}, {hi}]: need 0 <= lo <= hi <= 1")]
    InvalidBand { lo: f64, hi: f64 },
    #[error("invalid planar epsilon {0}")]
    InvalidPlanarEpsilon(f64),
    #[error("graph has {graph} nodes but mesh has {mesh} faces")]
    GraphMismatch { graph: usize, mesh: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SegmentMode {
    Normal,
    Spatial,
    NormalAndSpatial,
    Coplanar,
    SpatialCoplanar,
    Wall,
    Curve,
    Cylinder,
}

impl SegmentMode {
    pub const ALL: [SegmentMode; 8] = [
        SegmentMode::Normal,
        SegmentMode::Spatial,
        SegmentMode::NormalAndSpatial,
        SegmentMode::Coplanar,
        SegmentMode::SpatialCoplanar,
        SegmentMode::Wall,
        SegmentMode::Curve,
        SegmentMode::Cylinder,
    ];

    /// Accepted weight range. `Coplanar` has no upper bound.
    pub fn weight_domain(self) -> (f64, f64) {
        match self {
            SegmentMode::Normal | SegmentMode::NormalAndSpatial => (0.0, 2.0),
            SegmentMode::Coplanar | SegmentMode::SpatialCoplanar => (0.0, f64::INFINITY),
            SegmentMode::Wall | SegmentMode::Curve | SegmentMode::Cylinder => (0.0, 1.0),
            SegmentMode::Spatial => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// Mode-specific knobs. All optional.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SegmentParams {
    /// Cylinder: explicit `[lo, hi]` band for `N_j · N_i`.
    pub band: Option<(f64, f64)>,
    /// Cylinder: coplanar-step passthrough epsilon.
    pub planar_epsilon: Option<f64>,
    /// Wall: use raw signed dot products instead of absolute values. With
    /// this set a floor (normal `−UP`) passes the UP test.
    pub raw_wall_dots: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SegmentationRequest {
    pub mode: SegmentMode,
    pub seed: usize,
    #[serde(default)]
    pub weight: f64,
    #[serde(default)]
    pub params: SegmentParams,
}

impl SegmentationRequest {
    pub fn new(mode: SegmentMode, seed: usize, weight: f64) -> Self {
        SegmentationRequest {
            mode,
            seed,
            weight,
            params: SegmentParams::default(),
        }
    }

    pub fn with_params(mut self, params: SegmentParams) -> Self {
        self.params = params;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SegmentStatus {
    Ok,
    /// Wall segmentation: the seed's own normal is along the UP vector.
    SeedNotWall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub selection: Selection,
    pub status: SegmentStatus,
}

fn check_seed(mesh: &TriangleMesh, seed: usize) -> Result<(), SegmentError> {
    if seed >= mesh.face_count() {
        return Err(SegmentError::SeedOutOfRange {
            seed,
            count: mesh.face_count(),
        });
    }
    Ok(())
}

fn check_weight(mode: SegmentMode, weight: f64) -> Result<(), SegmentError> {
    let (min, max) = mode.weight_domain();
    if !(weight >= min && weight <= max) {
        return Err(SegmentError::WeightOutOfRange {
            mode,
            weight,
            min,
            max,
        });
    }
    Ok(())
}

fn check_graph(mesh: &TriangleMesh, graph: &FaceGraph) -> Result<(), SegmentError> {
    if graph.node_count() != mesh.face_count() {
        return Err(SegmentError::GraphMismatch {
            graph: graph.node_count(),
            mesh: mesh.face_count(),
        });
    }
    Ok(())
}

fn provenance(mode: SegmentMode, seed: usize, weight: f64, params: SegmentParams) -> Provenance {
    Provenance::Segmentation {
        request: SegmentationRequest {
            mode,
            seed,
            weight,
            params,
        },
    }
}

/// Breadth-first closure from `seed`: face `to` is admitted when some
/// admitted face `from` adjacent to it satisfies `admit(from, to)`. The seed
/// is always admitted.
pub fn grow_region(graph: &FaceGraph, seed: usize, mut admit: impl FnMut(usize, usize) -> bool) -> BTreeSet<u32> {
    let mut admitted = vec![false; graph.node_count()];
    let mut queue = VecDeque::from([seed]);
    admitted[seed] = true;
    while let Some(from) = queue.pop_front() {
        for &to in graph.neighbors(from) {
            let to = to as usize;
            if !admitted[to] && admit(from, to) {
                admitted[to] = true;
                queue.push_back(to);
            }
        }
    }
    admitted
        .iter()
        .enumerate()
        .filter_map(|(i, &a)| a.then_some(i as u32))
        .collect()
}

fn normal_distance(mesh: &TriangleMesh, a: usize, b: usize) -> f64 {
    (mesh.face(a).normal() - mesh.face(b).normal()).norm()
}

fn normal_dot(mesh: &TriangleMesh, a: usize, b: usize) -> f64 {
    mesh.face(a).normal().dot(mesh.face(b).normal())
}

/// Faces whose normal lies within `w` (Euclidean) of the seed normal.
pub fn seg_normal(mesh: &TriangleMesh, seed: usize, w: f64) -> Result<Selection, SegmentError> {
    check_seed(mesh, seed)?;
    check_weight(SegmentMode::Normal, w)?;
    let faces = (0..mesh.face_count())
        .filter(|&i| i == seed || normal_distance(mesh, seed, i) <= w)
        .map(|i| i as u32)
        .collect();
    Ok(Selection::from_set(
        mesh.face_count(),
        faces,
        provenance(SegmentMode::Normal, seed, w, SegmentParams::default()),
    ))
}

/// Connected component of the seed.
pub fn seg_spatial(mesh: &TriangleMesh, graph: &FaceGraph, seed: usize) -> Result<Selection, SegmentError> {
    check_seed(mesh, seed)?;
    check_graph(mesh, graph)?;
    Ok(Selection::from_set(
        mesh.face_count(),
        grow_region(graph, seed, |_, _| true),
        provenance(SegmentMode::Spatial, seed, 0.0, SegmentParams::default()),
    ))
}

pub fn seg_normal_spatial(
    mesh: &TriangleMesh,
    graph: &FaceGraph,
    seed: usize,
    w: f64,
) -> Result<Selection, SegmentError> {
    check_seed(mesh, seed)?;
    check_weight(SegmentMode::NormalAndSpatial, w)?;
    check_graph(mesh, graph)?;
    let faces = grow_region(graph, seed, |_, i| normal_distance(mesh, seed, i) <= w);
    Ok(Selection::from_set(
        mesh.face_count(),
        faces,
        provenance(SegmentMode::NormalAndSpatial, seed, w, SegmentParams::default()),
    ))
}

/// Distance of face `i`'s centroid from the plane through the seed's first
/// vertex with the seed normal.
pub fn seed_plane_distance(mesh: &TriangleMesh, seed: usize, i: usize) -> f64 {
    let s = mesh.face(seed);
    let anchor = mesh.vertices()[s.vertices()[0] as usize];
    (mesh.face(i).centroid() - anchor).dot(s.normal()).abs()
}

fn coplanar_tolerance(mesh: &TriangleMesh, w: f64) -> f64 {
    w * mesh.diagonal()
}

/// Faces whose centroid lies within `w · diagonal` of the seed plane.
pub fn seg_coplanar(mesh: &TriangleMesh, seed: usize, w: f64) -> Result<Selection, SegmentError> {
    check_seed(mesh, seed)?;
    check_weight(SegmentMode::Coplanar, w)?;
    let tol = coplanar_tolerance(mesh, w);
    let faces = (0..mesh.face_count())
        .filter(|&i| i == seed || seed_plane_distance(mesh, seed, i) <= tol)
        .map(|i| i as u32)
        .collect();
    Ok(Selection::from_set(
        mesh.face_count(),
        faces,
        provenance(SegmentMode::Coplanar, seed, w, SegmentParams::default()),
    ))
}

/// Connected coplanar patch containing the seed.
pub fn seg_spatial_coplanar(
    mesh: &TriangleMesh,
    graph: &FaceGraph,
    seed: usize,
    w: f64,
) -> Result<Selection, SegmentError> {
    check_seed(mesh, seed)?;
    check_weight(SegmentMode::SpatialCoplanar, w)?;
    check_graph(mesh, graph)?;
    let tol = coplanar_tolerance(mesh, w);
    let faces = grow_region(graph, seed, |_, i| seed_plane_distance(mesh, seed, i) <= tol);
    Ok(Selection::from_set(
        mesh.face_count(),
        faces,
        provenance(SegmentMode::SpatialCoplanar, seed, w, SegmentParams::default()),
    ))
}

/// UP test for wall faces. Strict so that at `w = 0` exactly vertical
/// normals (roofs, floors) are still rejected.
fn wall_up_ok(mesh: &TriangleMesh, face: usize, w: f64, raw: bool) -> bool {
    let d = mesh.up().dot(mesh.face(face).normal());
    let d = if raw { d } else { d.abs() };
    d < 1.0 - w
}

/// Parallel-or-perpendicular test against the seed.
fn wall_orientation_ok(mesh: &TriangleMesh, seed: usize, face: usize, w: f64, raw: bool) -> bool {
    let d = normal_dot(mesh, seed, face);
    let d = if raw { d } else { d.abs() };
    d <= w || d >= 1.0 - w
}

/// Whether the seed itself qualifies as a wall face.
pub fn wall_seed_ok(mesh: &TriangleMesh, seed: usize, w: f64, params: &SegmentParams) -> bool {
    wall_up_ok(mesh, seed, w, params.raw_wall_dots)
}

/// Connected faces parallel or perpendicular to the seed and not along UP.
/// Returns an empty selection when the seed fails the UP test.
pub fn seg_wall(
    mesh: &TriangleMesh,
    graph: &FaceGraph,
    seed: usize,
    w: f64,
    params: &SegmentParams,
) -> Result<Selection, SegmentError> {
    check_seed(mesh, seed)?;
    check_weight(SegmentMode::Wall, w)?;
    check_graph(mesh, graph)?;
    let raw = params.raw_wall_dots;
    let prov = provenance(SegmentMode::Wall, seed, w, *params);
    if !wall_seed_ok(mesh, seed, w, params) {
        return Ok(Selection::from_set(mesh.face_count(), BTreeSet::new(), prov));
    }
    let faces = grow_region(graph, seed, |_, i| {
        wall_orientation_ok(mesh, seed, i, w, raw) && wall_up_ok(mesh, i, w, raw)
    });
    Ok(Selection::from_set(mesh.face_count(), faces, prov))
}

/// Smooth-gradient traversal: each step needs `N_prev · N_next ≥ w`.
pub fn seg_curve(mesh: &TriangleMesh, graph: &FaceGraph, seed: usize, w: f64) -> Result<Selection, SegmentError> {
    check_seed(mesh, seed)?;
    check_weight(SegmentMode::Curve, w)?;
    check_graph(mesh, graph)?;
    let faces = grow_region(graph, seed, |j, i| normal_dot(mesh, j, i) >= w - CURVE_DOT_SLACK);
    Ok(Selection::from_set(
        mesh.face_count(),
        faces,
        provenance(SegmentMode::Curve, seed, w, SegmentParams::default()),
    ))
}

/// Resolved cylinder admission rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderRule {
    pub lo: f64,
    pub hi: f64,
    pub planar_epsilon: f64,
}

impl CylinderRule {
    pub fn resolve(w: f64, params: &SegmentParams) -> Result<Self, SegmentError> {
        let (lo, hi) = params.band.unwrap_or((w, 1.0 - DEFAULT_BAND_EPSILON));
        if params.band.is_some() && !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(SegmentError::InvalidBand { lo, hi });
        }
        let planar_epsilon = params.planar_epsilon.unwrap_or(DEFAULT_PLANAR_EPSILON);
        if !(0.0..=2.0).contains(&planar_epsilon) {
            return Err(SegmentError::InvalidPlanarEpsilon(planar_epsilon));
        }
        Ok(CylinderRule {
            lo,
            hi,
            planar_epsilon,
        })
    }

    pub fn admits(&self, dot: f64) -> bool {
        (self.lo <= dot && dot <= self.hi) || dot >= 1.0 - self.planar_epsilon
    }
}

/// Banded-gradient traversal for faceted cylinders.
pub fn seg_cylinder(
    mesh: &TriangleMesh,
    graph: &FaceGraph,
    seed: usize,
    w: f64,
    params: &SegmentParams,
) -> Result<Selection, SegmentError> {
    check_seed(mesh, seed)?;
    check_weight(SegmentMode::Cylinder, w)?;
    check_graph(mesh, graph)?;
    let rule = CylinderRule::resolve(w, params)?;
    let faces = grow_region(graph, seed, |j, i| rule.admits(normal_dot(mesh, j, i)));
    Ok(Selection::from_set(
        mesh.face_count(),
        faces,
        provenance(SegmentMode::Cylinder, seed, w, *params),
    ))
}

/// Dispatches a request to the matching segmentation routine.
pub fn segment(
    mesh: &TriangleMesh,
    graph: &FaceGraph,
    req: &SegmentationRequest,
) -> Result<Segmentation, SegmentError> {
    let (seed, w) = (req.seed, req.weight);
    let selection = match req.mode {
        SegmentMode::Normal => seg_normal(mesh, seed, w)?,
        SegmentMode::Spatial => seg_spatial(mesh, graph, seed)?,
        SegmentMode::NormalAndSpatial => seg_normal_spatial(mesh, graph, seed, w)?,
        SegmentMode::Coplanar => seg_coplanar(mesh, seed, w)?,
        SegmentMode::SpatialCoplanar => seg_spatial_coplanar(mesh, graph, seed, w)?,
        SegmentMode::Wall => seg_wall(mesh, graph, seed, w, &req.params)?,
        SegmentMode::Curve => seg_curve(mesh, graph, seed, w)?,
        SegmentMode::Cylinder => seg_cylinder(mesh, graph, seed, w, &req.params)?,
    };
    let status = if req.mode == SegmentMode::Wall && !wall_seed_ok(mesh, seed, w, &req.params) {
        SegmentStatus::SeedNotWall
    } else {
        SegmentStatus::Ok
    };
    Ok(Segmentation { selection, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{build_base_graph, weld_graph};
    use crate::mesh::Vector;

    fn face_with_normal(mesh: &TriangleMesh, n: Vector) -> usize {
        (0..mesh.face_count())
            .find(|&i| (mesh.face(i).normal() - n).norm() < 1e-12)
            .unwrap()
    }

    #[test]
    fn normal_on_cube() {
        let cube = fixtures::unit_cube();
        let top = face_with_normal(&cube, Vector::z());
        let sel = seg_normal(&cube, top, 1e-6).unwrap();
        assert_eq!(sel.len(), 2);
        assert!(sel.contains(top as u32));
        assert_eq!(seg_normal(&cube, top, 2.0).unwrap().len(), 12);
    }

    #[test]
    fn parameter_errors() {
        let cube = fixtures::unit_cube();
        let g = build_base_graph(&cube);
        assert!(matches!(seg_normal(&cube, 12, 0.1), Err(SegmentError::SeedOutOfRange { .. })));
        assert!(matches!(seg_normal(&cube, 0, 2.5), Err(SegmentError::WeightOutOfRange { .. })));
        assert!(matches!(seg_normal(&cube, 0, -0.1), Err(SegmentError::WeightOutOfRange { .. })));
        assert!(matches!(seg_normal(&cube, 0, f64::NAN), Err(SegmentError::WeightOutOfRange { .. })));
        assert!(seg_coplanar(&cube, 0, -1.0).is_err());
        assert!(seg_wall(&cube, &g, 0, 1.5, &SegmentParams::default()).is_err());
        assert!(seg_curve(&cube, &g, 0, -0.5).is_err());
        let bad = SegmentParams {
            band: Some((0.8, 0.2)),
            ..Default::default()
        };
        assert!(matches!(
            seg_cylinder(&cube, &g, 0, 0.5, &bad),
            Err(SegmentError::InvalidBand { .. })
        ));
        let other = build_base_graph(&fixtures::cube_pair(0.5));
        assert!(matches!(seg_spatial(&cube, &other, 0), Err(SegmentError::GraphMismatch { .. })));
    }

    #[test]
    fn spatial_respects_graph() {
        let pair = fixtures::cube_pair(0.05);
        let base = build_base_graph(&pair);
        assert_eq!(seg_spatial(&pair, &base, 0).unwrap().to_vec(), (0..12).collect::<Vec<_>>());
        let welded = weld_graph(&pair, &base, 10.0).unwrap();
        assert_eq!(seg_spatial(&pair, &welded, 0).unwrap().len(), 24);
    }

    #[test]
    fn normal_spatial_needs_connectivity() {
        let plates = fixtures::coplanar_plates();
        let g = build_base_graph(&plates);
        let sel = seg_normal_spatial(&plates, &g, 0, 1e-6).unwrap();
        assert_eq!(sel.len(), plates.face_count() / 2);
        assert_eq!(seg_normal(&plates, 0, 1e-6).unwrap().len(), plates.face_count());
    }

    #[test]
    fn coplanar_on_cube_and_grid() {
        let cube = fixtures::unit_cube();
        let top = face_with_normal(&cube, Vector::z());
        assert_eq!(seg_coplanar(&cube, top, 1e-6).unwrap().len(), 2);
        let grid = fixtures::flat_grid(2, 2);
        assert_eq!(grid.face_count(), 8);
        for seed in 0..8 {
            assert_eq!(seg_coplanar(&grid, seed, 1e-6).unwrap().len(), 8);
        }
    }

    #[test]
    fn spatial_coplanar_contrast() {
        let plates = fixtures::coplanar_plates();
        let g = build_base_graph(&plates);
        let half = plates.face_count() / 2;
        assert_eq!(seg_spatial_coplanar(&plates, &g, 0, 1e-6).unwrap().len(), half);
        assert_eq!(seg_coplanar(&plates, 0, 1e-6).unwrap().len(), 2 * half);
    }

    #[test]
    fn wall_on_box_house() {
        let house = fixtures::box_house();
        let g = build_base_graph(&house);
        let seed = face_with_normal(&house, Vector::x());
        let walls: Vec<u32> = (0..house.face_count() as u32)
            .filter(|&i| house.face(i as usize).normal().z == 0.0)
            .collect();
        assert_eq!(walls.len(), 8);
        let p = SegmentParams::default();
        assert_eq!(seg_wall(&house, &g, seed, 0.1, &p).unwrap().to_vec(), walls);
        assert_eq!(seg_wall(&house, &g, seed, 0.0, &p).unwrap().to_vec(), walls);

        let raw = SegmentParams {
            raw_wall_dots: true,
            ..Default::default()
        };
        let with_floor = seg_wall(&house, &g, seed, 0.1, &raw).unwrap();
        assert_eq!(with_floor.len(), 10);
        assert!(with_floor
            .faces()
            .iter()
            .all(|&i| house.face(i as usize).normal().z <= 0.0));
    }

    #[test]
    fn wall_seed_on_roof_reports_status() {
        let house = fixtures::box_house();
        let g = build_base_graph(&house);
        let roof = face_with_normal(&house, Vector::z());
        let out = segment(&house, &g, &SegmentationRequest::new(SegmentMode::Wall, roof, 0.1)).unwrap();
        assert!(out.selection.is_empty());
        assert_eq!(out.status, SegmentStatus::SeedNotWall);
    }

    #[test]
    fn curve_selects_vault_only() {
        let vault = fixtures::half_cylinder_vault();
        let g = build_base_graph(&vault.mesh);
        let sel = seg_curve(&vault.mesh, &g, vault.curved[3] as usize, 0.90).unwrap();
        assert_eq!(sel.to_vec(), vault.curved);
    }

    #[test]
    fn curve_limits() {
        let plate = fixtures::flat_grid(3, 3);
        let g = build_base_graph(&plate);
        assert_eq!(seg_curve(&plate, &g, 4, 1.0).unwrap().len(), plate.face_count());

        let vault = fixtures::half_cylinder_vault();
        let g = build_base_graph(&vault.mesh);
        let seed = vault.curved[0] as usize;
        let sel = seg_curve(&vault.mesh, &g, seed, 1.0).unwrap();
        // the two triangles of the seed's facet
        assert_eq!(sel.len(), 2);
        let n = vault.mesh.face(seed).normal();
        assert!(sel.faces().iter().all(|&i| vault.mesh.face(i as usize).normal().dot(n) > 1.0 - 1e-12));
    }

    #[test]
    fn cylinder_selects_lateral_surface() {
        let prism = fixtures::prism(16);
        let g = build_base_graph(&prism.mesh);
        let sel = seg_cylinder(&prism.mesh, &g, prism.curved[5] as usize, 0.90, &SegmentParams::default()).unwrap();
        assert_eq!(sel.to_vec(), prism.curved);
    }

    #[test]
    fn cylinder_full_band_is_component() {
        let prism = fixtures::prism(16);
        let g = build_base_graph(&prism.mesh);
        let params = SegmentParams {
            band: Some((0.0, 1.0)),
            ..Default::default()
        };
        let sel = seg_cylinder(&prism.mesh, &g, 0, 0.5, &params).unwrap();
        assert_eq!(sel.faces(), seg_spatial(&prism.mesh, &g, 0).unwrap().faces());
    }

    #[test]
    fn cylinder_planar_passthrough_on_plate() {
        let plate = fixtures::flat_grid(3, 3);
        let g = build_base_graph(&plate);
        let params = SegmentParams {
            band: Some((0.5, 0.999)),
            ..Default::default()
        };
        assert_eq!(seg_cylinder(&plate, &g, 0, 0.5, &params).unwrap().len(), plate.face_count());
    }
}
