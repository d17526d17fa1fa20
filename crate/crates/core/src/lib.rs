//! Semi-automatic conversion of triangle-mesh building models to
//! semantically annotated CityGML 2.0 LOD3.
//!
//! The pipeline is: load an OBJ ([`obj`]), build the face adjacency graph
//! ([`graph`]), grow selections with the segmentation operators
//! ([`segmentation`]) or pick/paint them ([`selection`]), assign semantic
//! classes ([`semantics`]) and write the CityGML document ([`citygml`]).
//! [`session`] wraps that state behind a JSON request protocol and
//! [`server`] exposes it over TCP. [`viewer`] holds the client side of that
//! protocol.
//!
//! See `examples/` for one runnable program per capability.

pub mod citygml;
pub mod fixtures;
pub mod graph;
pub mod mesh;
pub mod obj;
pub mod segmentation;
pub mod selection;
pub mod semantics;
pub mod server;
pub mod session;
pub mod viewer;

pub use citygml::{export_citygml, ExportOptions, OpeningPlacement, SchemaLocations};
pub use graph::{build_base_graph, weld_graph, FaceGraph};
pub use mesh::{Point, TriangleMesh, Vector};
pub use obj::{load_obj_file, load_obj_str};
pub use segmentation::{segment, SegmentMode, SegmentParams, SegmentationRequest};
pub use selection::{combine, PickRay, Selection, SetOp};
pub use semantics::{SemanticClass, SemanticMap};
pub use session::{Session, SessionService};
