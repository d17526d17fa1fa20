//! Normal-based and coplanarity-based selection from a seed face.

use citymesh::fixtures;
use citymesh::{build_base_graph, segment, SegmentMode, SegmentationRequest};

fn main() {
    let house = fixtures::gabled_house(30.0);
    let graph = build_base_graph(&house);
    let seed = (0..house.face_count())
        .find(|&f| house.face(f).normal().z > 0.5)
        .expect("a roof face");
    println!("seed face {seed} (roof slope), {} faces total", house.face_count());
    for (mode, w) in [
        (SegmentMode::Normal, 1e-6),
        (SegmentMode::Normal, 1.2),
        (SegmentMode::NormalAndSpatial, 1.2),
        (SegmentMode::Coplanar, 1e-6),
        (SegmentMode::SpatialCoplanar, 1e-6),
        (SegmentMode::Spatial, 0.0),
    ] {
        let out = segment(&house, &graph, &SegmentationRequest::new(mode, seed, w)).unwrap();
        println!("{mode:?} w={w}: {:?}", out.selection.to_vec());
    }
}
