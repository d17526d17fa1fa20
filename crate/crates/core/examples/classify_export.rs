//! Assign semantic classes and write a CityGML document.
//!
//! cargo run --example classify_export -- out.gml

use citymesh::citygml::{ExportOptions, OpeningPlacement};
use citymesh::fixtures;
use citymesh::semantics::{suggest_classes, SuggestThresholds};
use citymesh::{build_base_graph, export_citygml, SemanticClass, Selection};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let house = fixtures::gabled_house(30.0);
    let mut map = suggest_classes(&house, &SuggestThresholds::default());
    for class in SemanticClass::ALL {
        let n = map.count(class);
        if n > 0 {
            println!("suggested {class}: {n}");
        }
    }
    // the gable ends are left unclassified; mark them as closure surfaces
    let gables = Selection::from_faces(house.face_count(), map.faces_of(SemanticClass::Unclassified))?;
    map.assign(&gables, SemanticClass::ClosureSurface)?;
    // and one wall triangle becomes a door
    let door = map.faces_of(SemanticClass::WallSurface)[0];
    map.set(door as usize, SemanticClass::Door);

    let graph = build_base_graph(&house);
    let opts = ExportOptions {
        openings: OpeningPlacement::Nested,
        ..Default::default()
    };
    let xml = export_citygml(&house, &map, "gabled house", Some(&graph), &opts)?;
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, &xml)?;
            println!("wrote {path} ({} bytes)", xml.len());
        }
        None => print!("{xml}"),
    }
    println!("sidecar:\n{}", map.to_sidecar());
    Ok(())
}
