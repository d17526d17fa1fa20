//! Mutable editing session and its JSON request protocol.
//!
//! A [`Session`] owns the loaded mesh, the current face graph, the active
//! selection, named saved selections and the semantic map. Every successful
//! mutation bumps `revision`; responses echo the revision they reflect.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::citygml::{export_citygml, validate_faces, ExportError, ExportOptions, FaceIssue};
use crate::graph::{build_base_graph, weld_graph, FaceGraph, GraphError};
use crate::mesh::{MeshError, Point, TriangleMesh, Vector};
use crate::obj::{load_obj, write_obj, ObjError};
use crate::segmentation::{segment, SegmentError, SegmentStatus, SegmentationRequest};
use crate::selection::{combine, paint_stroke, pick_first_hit, PickRay, Selection, SelectionError, SetOp};
use crate::semantics::{suggest_classes, SemanticClass, SemanticMap, SemanticsError, SuggestThresholds};

pub const SESSION_MAGIC: &str = "# citymesh session v1";

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Obj(#[from] ObjError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error("session file line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("no saved selection named `{0}`")]
    UnknownSelection(String),
}

impl SessionError {
    /// Machine-readable code used in error responses.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Io { .. } => "IO_ERROR",
            SessionError::Obj(_) => "MODEL_ERROR",
            SessionError::Header { .. } | SessionError::Semantics(_) => "SESSION_FILE_ERROR",
            SessionError::Export(_) => "EXPORT_ERROR",
            SessionError::UnknownSelection(_) => "NOT_FOUND",
            SessionError::Mesh(_)
            | SessionError::Graph(_)
            | SessionError::Segment(_)
            | SessionError::Selection(_) => "INVALID_PARAMETER",
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SessionError + '_ {
    move |source| SessionError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Header values of a saved session file.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionHeader {
    pub model_sha256: Option<String>,
    pub weld_precision: Option<f64>,
    pub up: Option<Vector>,
}

/// Parses a session file: `# key: value` header lines followed by
/// `faceIndex<TAB>classLabel` lines. A plain sidecar without headers is
/// also accepted.
pub fn read_session_file(text: &str, face_count: usize) -> Result<(SessionHeader, SemanticMap), SessionError> {
    let mut header = SessionHeader {
        model_sha256: None,
        weld_precision: None,
        up: None,
    };
    for (n, line) in text.lines().enumerate() {
        let Some(rest) = line.strip_prefix('#') else {
            continue;
        };
        let Some((key, value)) = rest.split_once(':') else {
            continue;
        };
        let bad = |message: String| SessionError::Header { line: n + 1, message };
        let value = value.trim();
        match key.trim() {
            "model-sha256" => header.model_sha256 = Some(value.to_string()),
            "weld-precision" => {
                header.weld_precision = match value {
                    "none" => None,
                    v => Some(v.parse().map_err(|_| bad(format!("invalid weld precision `{v}`")))?),
                }
            }
            "up" => {
                let c: Vec<f64> = value
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad(format!("invalid up vector `{value}`")))?;
                if c.len() != 3 {
                    return Err(bad(format!("invalid up vector `{value}`")));
                }
                header.up = Some(Vector::new(c[0], c[1], c[2]));
            }
            _ => {}
        }
    }
    let map = SemanticMap::read_sidecar(text.as_bytes(), face_count)?;
    Ok((header, map))
}

#[derive(Debug, Clone)]
pub struct Session {
    model_path: Option<PathBuf>,
    model_sha256: String,
    mesh: TriangleMesh,
    base_graph: FaceGraph,
    graph: FaceGraph,
    active: Selection,
    saved: BTreeMap<String, Selection>,
    semantics: SemanticMap,
    last_segmentation: Option<SegmentationRequest>,
    revision: u64,
}

impl Session {
    /// Starts a session on an in-memory mesh. The model hash is taken over
    /// the mesh's OBJ serialization.
    pub fn from_mesh(mesh: TriangleMesh) -> Self {
        let hash = sha256_hex(write_obj(&mesh).as_bytes());
        Self::with_hash(mesh, hash, None)
    }

    fn with_hash(mesh: TriangleMesh, model_sha256: String, model_path: Option<PathBuf>) -> Self {
        let base_graph = build_base_graph(&mesh);
        let n = mesh.face_count();
        Session {
            model_path,
            model_sha256,
            graph: base_graph.clone(),
            base_graph,
            active: Selection::empty(n),
            saved: BTreeMap::new(),
            semantics: SemanticMap::new(n),
            last_segmentation: None,
            mesh,
            revision: 0,
        }
    }

    /// Loads an OBJ model and builds its base graph.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, SessionError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(io_err(path))?;
        let mesh = load_obj(BufReader::new(bytes.as_slice()))?;
        log::info!(
            "loaded {}: {} vertices, {} faces ({} degenerate dropped)",
            path.display(),
            mesh.vertices().len(),
            mesh.face_count(),
            mesh.dropped_degenerate()
        );
        Ok(Self::with_hash(mesh, sha256_hex(&bytes), Some(path.to_path_buf())))
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn graph(&self) -> &FaceGraph {
        &self.graph
    }

    pub fn active_selection(&self) -> &Selection {
        &self.active
    }

    pub fn semantics(&self) -> &SemanticMap {
        &self.semantics
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn model_sha256(&self) -> &str {
        &self.model_sha256
    }

    pub fn model_path(&self) -> Option<&Path> {
        self.model_path.as_deref()
    }

    pub fn last_segmentation(&self) -> Option<&SegmentationRequest> {
        self.last_segmentation.as_ref()
    }

    fn bump(&mut self) -> u64 {
        self.revision += 1;
        self.revision
    }

    /// Runs a segmentation and makes its result the active selection.
    pub fn run_segmentation(&mut self, req: &SegmentationRequest) -> Result<SegmentStatus, SessionError> {
        let out = segment(&self.mesh, &self.graph, req)?;
        self.active = out.selection;
        self.last_segmentation = Some(*req);
        self.bump();
        Ok(out.status)
    }

    pub fn pick(&self, ray: &PickRay) -> Option<usize> {
        pick_first_hit(&self.mesh, ray)
    }

    pub fn paint(&mut self, rays: &[PickRay], erase: bool) -> Result<(), SessionError> {
        self.active = paint_stroke(&self.mesh, rays, erase, &self.active)?;
        self.bump();
        Ok(())
    }

    pub fn set_selection(&mut self, sel: Selection) -> Result<(), SessionError> {
        if sel.face_count() != self.mesh.face_count() {
            return Err(SelectionError::MeshMismatch(sel.face_count(), self.mesh.face_count()).into());
        }
        self.active = sel;
        self.bump();
        Ok(())
    }

    pub fn save_selection(&mut self, name: &str) {
        self.saved.insert(name.to_string(), self.active.clone());
        self.bump();
    }

    pub fn saved_selection(&self, name: &str) -> Option<&Selection> {
        self.saved.get(name)
    }

    /// `active = active <op> saved[name]`.
    pub fn combine_with(&mut self, op: SetOp, name: &str) -> Result<(), SessionError> {
        let other = self
            .saved
            .get(name)
            .ok_or_else(|| SessionError::UnknownSelection(name.to_string()))?;
        self.active = combine(&self.active, other, op)?;
        self.bump();
        Ok(())
    }

    /// Rebuilds the graph: welded at `p`, or back to the base graph.
    pub fn set_weld_precision(&mut self, precision: Option<f64>) -> Result<(), SessionError> {
        self.graph = match precision {
            Some(p) => weld_graph(&self.mesh, &self.base_graph, p)?,
            None => self.base_graph.clone(),
        };
        self.bump();
        Ok(())
    }

    pub fn components(&self) -> Vec<Vec<u32>> {
        self.graph.connected_components()
    }

    pub fn assign_class(&mut self, class: SemanticClass) -> Result<usize, SessionError> {
        self.semantics.assign(&self.active, class)?;
        self.bump();
        Ok(self.active.len())
    }

    pub fn set_up_vector(&mut self, up: Vector) -> Result<(), SessionError> {
        self.mesh.set_up(up)?;
        self.bump();
        Ok(())
    }

    /// Session file text: header lines plus the semantics sidecar.
    pub fn session_text(&self) -> String {
        let up = self.mesh.up();
        let mut s = String::new();
        let _ = writeln!(s, "{SESSION_MAGIC}");
        let _ = writeln!(s, "# model-sha256: {}", self.model_sha256);
        match self.graph.weld_precision() {
            Some(p) => {
                let _ = writeln!(s, "# weld-precision: {p}");
            }
            None => s.push_str("# weld-precision: none\n"),
        }
        let _ = writeln!(s, "# up: {} {} {}", up.x, up.y, up.z);
        s.push_str(&self.semantics.to_sidecar());
        s
    }

    pub fn save_session(&self, path: impl AsRef<Path>) -> Result<(), SessionError> {
        let path = path.as_ref();
        fs::write(path, self.session_text()).map_err(io_err(path))
    }

    /// Applies a session file's header and class map.
    pub fn apply_session_text(&mut self, text: &str) -> Result<(), SessionError> {
        let (header, map) = read_session_file(text, self.mesh.face_count())?;
        if let Some(h) = &header.model_sha256 {
            if h != &self.model_sha256 {
                log::warn!("session was saved for a different model (sha256 {h})");
            }
        }
        let mut mesh = self.mesh.clone();
        if let Some(up) = header.up {
            mesh.set_up(up)?;
        }
        let graph = match header.weld_precision {
            Some(p) => weld_graph(&mesh, &self.base_graph, p)?,
            None => self.base_graph.clone(),
        };
        self.mesh = mesh;
        self.graph = graph;
        self.semantics = map;
        self.bump();
        Ok(())
    }

    pub fn load_session(&mut self, path: impl AsRef<Path>) -> Result<(), SessionError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        self.apply_session_text(&text)
    }

    pub fn export(&self, doc_name: &str, options: &ExportOptions) -> Result<String, SessionError> {
        Ok(export_citygml(&self.mesh, &self.semantics, doc_name, Some(&self.graph), options)?)
    }

    pub fn validate(&self) -> Vec<FaceIssue> {
        validate_faces(&self.mesh)
    }

    /// Flat render buffers for the current revision.
    pub fn mesh_buffers(&self) -> MeshBuffers {
        fn f32s(values: impl Iterator<Item = f64>) -> String {
            let bytes: Vec<u8> = values.flat_map(|v| (v as f32).to_le_bytes()).collect();
            BASE64.encode(bytes)
        }
        let mesh = &self.mesh;
        let indices: Vec<u8> = mesh
            .faces()
            .iter()
            .flat_map(|f| f.vertices())
            .flat_map(u32::to_le_bytes)
            .collect();
        let selected: Vec<u8> = (0..mesh.face_count() as u32)
            .map(|f| self.active.contains(f) as u8)
            .collect();
        MeshBuffers {
            revision: self.revision,
            vertex_count: mesh.vertices().len(),
            face_count: mesh.face_count(),
            positions: f32s(mesh.vertices().iter().flat_map(|p| [p.x, p.y, p.z])),
            indices: BASE64.encode(indices),
            face_normals: f32s(mesh.faces().iter().flat_map(|f| {
                let n = f.normal();
                [n.x, n.y, n.z]
            })),
            face_classes: BASE64.encode(self.semantics.classes().iter().map(|c| c.code()).collect::<Vec<_>>()),
            face_selected: BASE64.encode(selected),
            class_legend: SemanticClass::ALL.iter().map(|c| c.label().to_string()).collect(),
        }
    }
}

/// Render buffers. Binary arrays are base64 of little-endian values:
/// `positions` and `faceNormals` are `f32 × 3`, `indices` are `u32 × 3` per
/// face, `faceClasses` are one byte per face indexing `classLegend`,
/// `faceSelected` is one byte (0/1) per face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MeshBuffers {
    pub revision: u64,
    pub vertex_count: usize,
    pub face_count: usize,
    pub positions: String,
    pub indices: String,
    pub face_normals: String,
    pub face_classes: String,
    pub face_selected: String,
    pub class_legend: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayMessage {
    pub origin: [f64; 3],
    pub direction: [f64; 3],
}

impl RayMessage {
    pub fn to_ray(self) -> Result<PickRay, SelectionError> {
        PickRay::new(Point::from(self.origin), Vector::from(self.direction))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SelectWhich {
    All,
    None,
    Invert,
}

/// One request. Serialized with an `op` tag, e.g.
/// `{"op":"runSegmentation","mode":"normal","seed":0,"weight":0.1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum Request {
    GetInfo,
    GetMeshBuffers,
    RunSegmentation(SegmentationRequest),
    Pick(RayMessage),
    Paint {
        rays: Vec<RayMessage>,
        #[serde(default)]
        erase: bool,
    },
    Select {
        which: SelectWhich,
    },
    SetSelection {
        faces: Vec<u32>,
    },
    SaveSelection {
        name: String,
    },
    Combine {
        set_op: SetOp,
        name: String,
    },
    SetWeldPrecision {
        precision: Option<f64>,
    },
    GetComponents,
    AssignClass {
        class: SemanticClass,
    },
    SuggestClasses {
        #[serde(default)]
        thresholds: Option<SuggestThresholds>,
    },
    SetUpVector {
        up: [f64; 3],
    },
    SaveSession {
        path: PathBuf,
    },
    LoadSession {
        path: PathBuf,
    },
    Export {
        doc_name: String,
        #[serde(default)]
        path: Option<PathBuf>,
        #[serde(default)]
        options: ExportOptions,
    },
    Validate,
}

impl Request {
    pub fn is_mutation(&self) -> bool {
        matches!(
            self,
            Request::RunSegmentation(_)
                | Request::Paint { .. }
                | Request::Select { .. }
                | Request::SetSelection { .. }
                | Request::SaveSelection { .. }
                | Request::Combine { .. }
                | Request::SetWeldPrecision { .. }
                | Request::AssignClass { .. }
                | Request::SetUpVector { .. }
                | Request::LoadSession { .. }
        )
    }
}

/// Request plus optional correlation id and revision guard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Envelope {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_revision: Option<u64>,
    #[serde(flatten)]
    pub request: Request,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<Value>,
    pub ok: bool,
    pub revision: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
}

impl Response {
    fn success(id: Option<Value>, revision: u64, result: Value) -> Self {
        Response {
            id,
            ok: true,
            revision,
            result: Some(result),
            error: None,
        }
    }

    pub fn failure(id: Option<Value>, revision: u64, code: &str, message: impl Into<String>) -> Self {
        Response {
            id,
            ok: false,
            revision,
            result: None,
            error: Some(ErrorBody {
                code: code.to_string(),
                message: message.into(),
            }),
        }
    }
}

fn selection_json(sel: &Selection) -> Value {
    json!({ "faces": sel.to_vec(), "count": sel.len() })
}

impl Session {
    /// Applies one request. Read-only requests never change the revision.
    pub fn handle(&mut self, env: Envelope) -> Response {
        let id = env.id.clone();
        if let Some(expected) = env.expected_revision {
            if expected != self.revision {
                return Response::failure(
                    id,
                    self.revision,
                    "STALE_REVISION",
                    format!("request expects revision {expected}, session is at {}", self.revision),
                );
            }
        }
        match self.dispatch(env.request) {
            Ok(result) => Response::success(id, self.revision, result),
            Err(e) => Response::failure(id, self.revision, e.code(), e.to_string()),
        }
    }

    /// Handles read-only requests without mutable access.
    pub fn handle_read(&self, env: Envelope) -> Response {
        debug_assert!(!env.request.is_mutation());
        let id = env.id.clone();
        if let Some(expected) = env.expected_revision {
            if expected != self.revision {
                return Response::failure(
                    id,
                    self.revision,
                    "STALE_REVISION",
                    format!("request expects revision {expected}, session is at {}", self.revision),
                );
            }
        }
        match self.read(env.request) {
            Ok(result) => Response::success(id, self.revision, result),
            Err(e) => Response::failure(id, self.revision, e.code(), e.to_string()),
        }
    }

    fn read(&self, request: Request) -> Result<Value, SessionError> {
        Ok(match request {
            Request::GetInfo => {
                let bounds = self.mesh.bounds();
                json!({
                    "modelPath": self.model_path,
                    "modelSha256": self.model_sha256,
                    "vertexCount": self.mesh.vertices().len(),
                    "faceCount": self.mesh.face_count(),
                    "droppedDegenerate": self.mesh.dropped_degenerate(),
                    "weldPrecision": self.graph.weld_precision(),
                    "edgeCount": self.graph.edge_count(),
                    "componentCount": self.graph.connected_components().len(),
                    "up": [self.mesh.up().x, self.mesh.up().y, self.mesh.up().z],
                    "boundsMin": bounds.map(|b| [b.min.x, b.min.y, b.min.z]),
                    "boundsMax": bounds.map(|b| [b.max.x, b.max.y, b.max.z]),
                    "selectionCount": self.active.len(),
                    "savedSelections": self.saved.keys().collect::<Vec<_>>(),
                })
            }
            Request::GetMeshBuffers => serde_json::to_value(self.mesh_buffers()).expect("serializable"),
            Request::Pick(ray) => json!({ "face": self.pick(&ray.to_ray()?) }),
            Request::GetComponents => {
                let comps = self.components();
                json!({ "count": comps.len(), "components": comps })
            }
            Request::SuggestClasses { thresholds } => {
                let map = suggest_classes(&self.mesh, &thresholds.unwrap_or_default());
                json!({ "classes": map.classes().iter().map(|c| c.label()).collect::<Vec<_>>() })
            }
            Request::SaveSession { path } => {
                self.save_session(&path)?;
                json!({ "path": path })
            }
            Request::Export {
                doc_name,
                path,
                options,
            } => {
                let doc = self.export(&doc_name, &options)?;
                if let Some(path) = &path {
                    fs::write(path, &doc).map_err(io_err(path))?;
                }
                json!({ "document": doc, "path": path, "unclassified": self.semantics.count(SemanticClass::Unclassified) })
            }
            Request::Validate => json!({ "issues": self.validate() }),
            other => unreachable!("mutation {other:?} routed to read path"),
        })
    }

    fn dispatch(&mut self, request: Request) -> Result<Value, SessionError> {
        if !request.is_mutation() {
            return self.read(request);
        }
        Ok(match request {
            Request::RunSegmentation(req) => {
                let status = self.run_segmentation(&req)?;
                json!({ "status": status, "selection": selection_json(&self.active) })
            }
            Request::Paint { rays, erase } => {
                let rays = rays.into_iter().map(RayMessage::to_ray).collect::<Result<Vec<_>, _>>()?;
                self.paint(&rays, erase)?;
                json!({ "selection": selection_json(&self.active) })
            }
            Request::Select { which } => {
                let n = self.mesh.face_count();
                let sel = match which {
                    SelectWhich::All => Selection::all(n),
                    SelectWhich::None => Selection::empty(n),
                    SelectWhich::Invert => self.active.invert(),
                };
                self.set_selection(sel)?;
                json!({ "selection": selection_json(&self.active) })
            }
            Request::SetSelection { faces } => {
                self.set_selection(Selection::from_faces(self.mesh.face_count(), faces)?)?;
                json!({ "selection": selection_json(&self.active) })
            }
            Request::SaveSelection { name } => {
                self.save_selection(&name);
                json!({ "name": name, "count": self.active.len() })
            }
            Request::Combine { set_op, name } => {
                self.combine_with(set_op, &name)?;
                json!({ "selection": selection_json(&self.active) })
            }
            Request::SetWeldPrecision { precision } => {
                self.set_weld_precision(precision)?;
                json!({ "edgeCount": self.graph.edge_count(), "componentCount": self.components().len() })
            }
            Request::AssignClass { class } => {
                let assigned = self.assign_class(class)?;
                json!({ "assigned": assigned, "class": class })
            }
            Request::SetUpVector { up } => {
                self.set_up_vector(Vector::from(up))?;
                let u = self.mesh.up();
                json!({ "up": [u.x, u.y, u.z] })
            }
            Request::LoadSession { path } => {
                self.load_session(&path)?;
                json!({ "path": path, "weldPrecision": self.graph.weld_precision() })
            }
            _ => unreachable!(),
        })
    }
}

/// Thread-safe wrapper: reads share a lock, mutations are serialized.
#[derive(Debug)]
pub struct SessionService {
    session: RwLock<Session>,
}

impl SessionService {
    pub fn new(session: Session) -> Self {
        SessionService {
            session: RwLock::new(session),
        }
    }

    pub fn handle(&self, env: Envelope) -> Response {
        if env.request.is_mutation() {
            let mut s = self.session.write().unwrap_or_else(|e| e.into_inner());
            s.handle(env)
        } else {
            let s = self.session.read().unwrap_or_else(|e| e.into_inner());
            s.handle_read(env)
        }
    }

    /// Parses one JSON request line and returns one JSON response line.
    pub fn handle_line(&self, line: &str) -> String {
        let response = match serde_json::from_str::<Envelope>(line) {
            Ok(env) => self.handle(env),
            Err(e) => {
                let revision = self.session.read().unwrap_or_else(|e| e.into_inner()).revision;
                let id = serde_json::from_str::<Value>(line)
                    .ok()
                    .and_then(|v| v.get("id").cloned());
                Response::failure(id, revision, "BAD_REQUEST", e.to_string())
            }
        };
        serde_json::to_string(&response).expect("serializable")
    }

    pub fn with_session<T>(&self, f: impl FnOnce(&Session) -> T) -> T {
        f(&self.session.read().unwrap_or_else(|e| e.into_inner()))
    }
}

/// Batch replay: loads `model`, applies the session file and writes the
/// CityGML document to `out`. The document name defaults to the output file
/// name.
pub fn convert(
    model: &Path,
    session_file: &Path,
    out: &Path,
    doc_name: Option<&str>,
    options: &ExportOptions,
) -> Result<usize, SessionError> {
    let mut session = Session::open(model)?;
    session.load_session(session_file)?;
    let name = doc_name.map(str::to_string).unwrap_or_else(|| {
        out.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "citymodel.gml".into())
    });
    let doc = session.export(&name, options)?;
    fs::write(out, doc).map_err(io_err(out))?;
    Ok(session.mesh().face_count())
}
