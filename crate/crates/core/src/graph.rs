//! Face adjacency graph.
//!
//! Nodes are triangle faces. Base edges join faces that share a vertex
//! index. An optional weld pass adds edges between faces whose vertices are
//! geometrically close (distance `< 1/p`) without touching the geometry.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::mesh::TriangleMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("weld precision must be a positive finite number, got {0}")]
    InvalidPrecision(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceGraph {
    adjacency: Vec<Vec<u32>>,
    weld_precision: Option<f64>,
}

impl FaceGraph {
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Sorted neighbor list of `face`.
    pub fn neighbors(&self, face: usize) -> &[u32] {
        &self.adjacency[face]
    }

    pub fn weld_precision(&self) -> Option<f64> {
        self.weld_precision
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&(b as u32)).is_ok()
    }

    /// All undirected edges as `(lo, hi)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (i, adj) in self.adjacency.iter().enumerate() {
            out.extend(adj.iter().filter(|&&j| j as usize > i).map(|&j| (i as u32, j)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn from_pairs(nodes: usize, pairs: impl IntoIterator<Item = (u32, u32)>, weld: Option<f64>) -> Self {
        let mut adjacency = vec![Vec::new(); nodes];
        for (a, b) in pairs {
            if a != b {
                adjacency[a as usize].push(b);
                adjacency[b as usize].push(a);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        FaceGraph {
            adjacency,
            weld_precision: weld,
        }
    }

    /// Builds a graph directly from an adjacency list. Used by tests that
    /// permute neighbor order; symmetry and self-loops are normalized.
    pub fn from_adjacency(adjacency: Vec<Vec<u32>>) -> Self {
        let n = adjacency.len();
        let pairs: Vec<_> = adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().map(move |&j| (i as u32, j)))
            .collect();
        Self::from_pairs(n, pairs, None)
    }

    /// Copy of this graph whose neighbor lists are in the given order.
    /// Edge sets are unchanged; only traversal order differs.
    pub fn with_neighbor_order(&self, mut order: impl FnMut(usize, &mut Vec<u32>)) -> Self {
        let mut g = self.clone();
        for (i, adj) in g.adjacency.iter_mut().enumerate() {
            order(i, adj);
        }
        g
    }

    /// Connected components, each sorted ascending; components are ordered
    /// by their smallest face index.
    pub fn connected_components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.node_count()];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.node_count() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start as u32);
            let mut comp = Vec::new();
            while let Some(f) = queue.pop_front() {
                comp.push(f);
                for &n in &self.adjacency[f as usize] {
                    if !seen[n as usize] {
                        seen[n as usize] = true;
                        queue.push_back(n);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Component id per face, consistent with [`connected_components`](Self::connected_components).
    pub fn component_labels(&self) -> Vec<u32> {
        let mut labels = vec![0; self.node_count()];
        for (id, comp) in self.connected_components().iter().enumerate() {
            for &f in comp {
                labels[f as usize] = id as u32;
            }
        }
        labels
    }
}

/// Faces incident to each vertex.
fn vertex_faces(mesh: &TriangleMesh) -> Vec<Vec<u32>> {
    let mut incident = vec![Vec::new(); mesh.vertices().len()];
    for (i, f) in mesh.faces().iter().enumerate() {
        for v in f.vertices() {
            incident[v as usize].push(i as u32);
        }
    }
    incident
}

fn link_all(a: &[u32], b: &[u32], out: &mut Vec<(u32, u32)>) {
    for &fa in a {
        for &fb in b {
            out.push((fa, fb));
        }
    }
}

/// Links every pair of faces sharing at least one vertex index.
pub fn build_base_graph(mesh: &TriangleMesh) -> FaceGraph {
    let mut pairs = Vec::new();
    for faces in vertex_faces(mesh) {
        for (k, &a) in faces.iter().enumerate() {
            for &b in &faces[k + 1..] {
                pairs.push((a, b));
            }
        }
    }
    FaceGraph::from_pairs(mesh.face_count(), pairs, None)
}

/// Groups vertices by `floor(|v| / threshold)`. Two vertices closer than
/// `threshold` differ in norm by less than `threshold`, so their keys are
/// equal or adjacent.
pub fn norm_buckets(mesh: &TriangleMesh, threshold: f64, used: &[bool]) -> HashMap<i64, Vec<u32>> {
    let mut buckets: HashMap<i64, Vec<u32>> = HashMap::new();
    for (i, v) in mesh.vertices().iter().enumerate() {
        if used[i] {
            buckets
                .entry(bucket_key(v.coords.norm(), threshold))
                .or_default()
                .push(i as u32);
        }
    }
    buckets
}

pub fn bucket_key(norm: f64, threshold: f64) -> i64 {
    (norm / threshold).floor() as i64
}

/// Vertex pairs `(u, v)`, `u < v`, closer than `1/p`, found via norm buckets.
pub fn weld_vertex_pairs(mesh: &TriangleMesh, p: f64) -> Result<Vec<(u32, u32)>, GraphError> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(GraphError::InvalidPrecision(p));
    }
    let threshold = 1.0 / p;
    let incident = vertex_faces(mesh);
    let used: Vec<bool> = incident.iter().map(|f| !f.is_empty()).collect();
    let buckets = norm_buckets(mesh, threshold, &used);
    let verts = mesh.vertices();

    let mut pairs = Vec::new();
    let mut close = |u: u32, v: u32| {
        if (verts[u as usize] - verts[v as usize]).norm() < threshold {
            pairs.push((u.min(v), u.max(v)));
        }
    };
    for (&key, members) in &buckets {
        for (k, &u) in members.iter().enumerate() {
            for &v in &members[k + 1..] {
                close(u, v);
            }
        }
        if let Some(next) = buckets.get(&(key + 1)) {
            for &u in members {
                for &v in next {
                    close(u, v);
                }
            }
        }
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Base graph plus weld edges for vertex pairs closer than `1/p`.
pub fn weld_graph(mesh: &TriangleMesh, base: &FaceGraph, p: f64) -> Result<FaceGraph, GraphError> {
    let vertex_pairs = weld_vertex_pairs(mesh, p)?;
    let incident = vertex_faces(mesh);
    let mut pairs = base.edges();
    for (u, v) in vertex_pairs {
        link_all(&incident[u as usize], &incident[v as usize], &mut pairs);
    }
    Ok(FaceGraph::from_pairs(mesh.face_count(), pairs, Some(p)))
}
