//! Wall, curve and cylinder traversals on box, vault and prism fixtures.

use citymesh::fixtures;
use citymesh::segmentation::SegmentStatus;
use citymesh::{build_base_graph, segment, SegmentMode, SegmentParams, SegmentationRequest};

fn main() {
    let house = fixtures::box_house();
    let g = build_base_graph(&house);
    let wall = (0..12).find(|&f| house.face(f).normal().x > 0.9).unwrap();
    let walls = segment(&house, &g, &SegmentationRequest::new(SegmentMode::Wall, wall, 0.1)).unwrap();
    println!("box house walls: {:?}", walls.selection.to_vec());
    let raw = SegmentParams {
        raw_wall_dots: true,
        ..Default::default()
    };
    let literal = segment(&house, &g, &SegmentationRequest::new(SegmentMode::Wall, wall, 0.1).with_params(raw)).unwrap();
    println!("with raw dot products (floor leaks in): {:?}", literal.selection.to_vec());
    let roof = (0..12).find(|&f| house.face(f).normal().z > 0.9).unwrap();
    let refused = segment(&house, &g, &SegmentationRequest::new(SegmentMode::Wall, roof, 0.1)).unwrap();
    assert_eq!(refused.status, SegmentStatus::SeedNotWall);
    println!("roof seed: {:?}", refused.status);

    let vault = fixtures::half_cylinder_vault();
    let g = build_base_graph(&vault.mesh);
    for w in [0.90, 0.95, 1.0] {
        let out = segment(&vault.mesh, &g, &SegmentationRequest::new(SegmentMode::Curve, vault.curved[0] as usize, w)).unwrap();
        println!("vault curve w={w}: {} of {} vault faces", out.selection.len(), vault.curved.len());
    }

    let prism = fixtures::prism(16);
    let g = build_base_graph(&prism.mesh);
    let seed = prism.curved[0] as usize;
    let out = segment(&prism.mesh, &g, &SegmentationRequest::new(SegmentMode::Cylinder, seed, 0.9)).unwrap();
    println!("prism cylinder w=0.9: {} faces (lateral surface has {})", out.selection.len(), prism.curved.len());
    let band = SegmentParams {
        band: Some((0.95, 0.99)),
        ..Default::default()
    };
    let out = segment(&prism.mesh, &g, &SegmentationRequest::new(SegmentMode::Cylinder, seed, 0.9).with_params(band)).unwrap();
    println!("prism cylinder band [0.95, 0.99]: {} faces", out.selection.len());
}
