//! Save an interactive session and replay it in batch, checking that both
//! produce the same document.

use citymesh::fixtures;
use citymesh::obj::write_obj;
use citymesh::session::{convert, Session};
use citymesh::{ExportOptions, SegmentMode, SegmentationRequest, SemanticClass};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("citymesh-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let model = dir.join("house.obj");
    std::fs::write(&model, write_obj(&fixtures::box_house()))?;

    let mut session = Session::open(&model)?;
    let wall = (0..12).find(|&f| session.mesh().face(f).normal().x > 0.9).unwrap();
    session.run_segmentation(&SegmentationRequest::new(SegmentMode::Wall, wall, 0.1))?;
    session.assign_class(SemanticClass::WallSurface)?;
    let session_file = dir.join("house.session");
    session.save_session(&session_file)?;
    println!("{}", std::fs::read_to_string(&session_file)?);

    let out = dir.join("house.gml");
    let interactive = session.export("house.gml", &ExportOptions::default())?;
    convert(&model, &session_file, &out, None, &ExportOptions::default())?;
    let replayed = std::fs::read_to_string(&out)?;
    println!("replay identical: {}", replayed == interactive);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
