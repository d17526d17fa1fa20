//! Picking, paint strokes and set operations on selections.

use citymesh::fixtures;
use citymesh::mesh::{Point, Vector};
use citymesh::selection::{paint_stroke, pick_first_hit};
use citymesh::{build_base_graph, combine, segment, PickRay, SegmentMode, SegmentationRequest, Selection, SetOp};

fn main() {
    let cube = fixtures::centered_cube();
    let ray = PickRay::new(Point::new(-5.0, 0.1, 0.2), Vector::x()).unwrap();
    println!("ray +X hits face {:?}", pick_first_hit(&cube, &ray));

    let sphere = fixtures::uv_sphere(12, 16);
    let stroke: Vec<PickRay> = (0..10)
        .map(|k| PickRay::new(Point::new(-3.0, -0.5 + 0.1 * k as f64, 0.05), Vector::x()).unwrap())
        .collect();
    let painted = paint_stroke(&sphere, &stroke, false, &Selection::empty(sphere.face_count())).unwrap();
    println!("stroke across sphere painted {:?}", painted.to_vec());
    let erased = paint_stroke(&sphere, &stroke[..5], true, &painted).unwrap();
    println!("after erasing half: {:?}", erased.to_vec());

    // select everything, then subtract walls and roof to leave the floor
    let house = fixtures::box_house();
    let g = build_base_graph(&house);
    let find = |pred: fn(&Vector) -> bool| (0..12).find(|&f| pred(house.face(f).normal())).unwrap();
    let walls = segment(&house, &g, &SegmentationRequest::new(SegmentMode::Wall, find(|n| n.x > 0.9), 0.1))
        .unwrap()
        .selection;
    let roof = segment(&house, &g, &SegmentationRequest::new(SegmentMode::Normal, find(|n| n.z > 0.9), 1e-6))
        .unwrap()
        .selection;
    let all = Selection::all(house.face_count());
    let rest = combine(&combine(&all, &walls, SetOp::Difference).unwrap(), &roof, SetOp::Difference).unwrap();
    println!("all - walls - roof = {:?}", rest.to_vec());
    println!("walls & roof = {:?}", combine(&walls, &roof, SetOp::Intersection).unwrap().to_vec());
    println!("inverse of floor = {} faces", rest.invert().len());
}
