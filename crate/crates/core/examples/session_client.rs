//! Run the session service in-process and drive it over TCP the way a
//! viewer would: pick from a camera click, segment, tune the weight,
//! classify and fetch render buffers.

use std::sync::Arc;

use serde_json::json;

use citymesh::fixtures;
use citymesh::mesh::{Point, Vector};
use citymesh::server::{Client, Server};
use citymesh::session::{MeshBuffers, Response, Session, SessionService};
use citymesh::viewer::{Camera, ViewState};
use citymesh::{SegmentMode, SegmentationRequest};

fn send(client: &mut Client, view: &mut ViewState, request: serde_json::Value) -> Response {
    let line = client.send_line(&request.to_string()).expect("server reachable");
    let response: Response = serde_json::from_str(&line).expect("valid response");
    view.observe(&response);
    println!("-> {request}\n<- ok={} revision={}", response.ok, response.revision);
    response
}

fn main() -> std::io::Result<()> {
    let service = Arc::new(SessionService::new(Session::from_mesh(fixtures::gabled_house(30.0))));
    let server = Server::bind("127.0.0.1:0", service)?;
    let addr = server.local_addr()?;
    server.spawn();
    let mut client = Client::connect(addr)?;

    let mut view = ViewState::new();
    view.camera = Some(Camera::look_at(Point::new(5.0, -20.0, 3.0), Point::new(5.0, 0.0, 3.0), Vector::z()));
    let pick = view.pick_request(400.0, 300.0, 800.0, 600.0).expect("camera set");
    let r = send(&mut client, &mut view, serde_json::to_value(pick).unwrap());
    let face = r.result.unwrap()["face"].as_u64().expect("the click hits the front wall") as usize;
    println!("clicked face {face}");

    let seg = view.segmentation(SegmentationRequest::new(SegmentMode::Wall, face, 0.1));
    let r = send(&mut client, &mut view, serde_json::to_value(seg).unwrap());
    println!("walls: {}", r.result.unwrap()["selection"]["count"]);
    if let Some(retry) = view.set_weight(0.0) {
        let r = send(&mut client, &mut view, serde_json::to_value(retry).unwrap());
        println!("walls at w=0: {}", r.result.unwrap()["selection"]["count"]);
    }
    send(&mut client, &mut view, json!({"op": "assignClass", "class": "WallSurface"}));
    send(&mut client, &mut view, json!({"op": "saveSelection", "name": "walls"}));

    let r = send(&mut client, &mut view, json!({"op": "getMeshBuffers"}));
    let buffers: MeshBuffers = serde_json::from_value(r.result.unwrap()).unwrap();
    view.accept_buffers(&buffers).expect("well-formed buffers");
    let decoded = view.buffers.as_ref().unwrap();
    println!("{} triangles, legend {:?}", decoded.triangle_count(), decoded.legend());
    let before = view.mode;
    println!("render mode {before:?} -> {:?}", view.toggle_mode());

    let stale = send(&mut client, &mut view, json!({"op": "select", "which": "all", "expectedRevision": 0}));
    println!("stale request rejected: {:?}", stale.error.map(|e| e.code));
    Ok(())
}
