//! Load an OBJ model and print mesh statistics and ring problems.
//!
//! cargo run --example inspect_model -- path/to/model.obj
//!
//! Without an argument a built-in gabled house is used.

use citymesh::citygml::validate_faces;
use citymesh::fixtures;
use citymesh::obj::load_obj_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = match std::env::args().nth(1) {
        Some(path) => load_obj_file(path)?,
        None => fixtures::gabled_house(30.0),
    };
    let bounds = mesh.bounds().ok_or("empty mesh")?;
    println!("vertices:  {}", mesh.vertices().len());
    println!("faces:     {}", mesh.face_count());
    println!("dropped:   {} degenerate", mesh.dropped_degenerate());
    println!("bounds:    {:?} .. {:?}", bounds.min.coords.as_slice(), bounds.max.coords.as_slice());
    println!("diagonal:  {:.4}", mesh.diagonal());
    for f in 0..mesh.face_count().min(5) {
        let n = mesh.face(f).normal();
        println!("face {f}: normal ({:.3}, {:.3}, {:.3})", n.x, n.y, n.z);
    }
    let issues = validate_faces(&mesh);
    println!("issues:    {}", issues.len());
    for i in issues {
        println!("  face {} {}", i.face, i.code.as_str());
    }
    Ok(())
}
