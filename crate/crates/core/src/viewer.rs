//! Client side of the session protocol: screen clicks to world rays,
//! decoded render buffers with the class color legend, render modes and
//! revision tracking. A graphical front end drives these; nothing here
//! draws.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use thiserror::Error;

use crate::mesh::{Point, Vector};
use crate::segmentation::SegmentationRequest;
use crate::selection::{PickRay, SelectionError};
use crate::semantics::SemanticClass;
use crate::session::{MeshBuffers, RayMessage, Request, Response};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ViewerError {
    #[error("point ({x}, {y}) lies outside the {width}x{height} viewport")]
    OutsideViewport { x: f64, y: f64, width: f64, height: f64 },
    #[error("camera eye, target and up are degenerate")]
    DegenerateCamera,
    #[error("buffer `{0}` is not valid base64")]
    Base64(&'static str),
    #[error("buffer `{name}` has {len} bytes, expected {expected}")]
    BufferLength {
        name: &'static str,
        len: usize,
        expected: usize,
    },
    #[error("class code {0} is not in the legend")]
    UnknownClassCode(u8),
    #[error(transparent)]
    Ray(#[from] SelectionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderMode {
    #[default]
    Editable,
    Shaded,
    Wireframe,
}

impl RenderMode {
    pub fn next(self) -> Self {
        match self {
            RenderMode::Editable => RenderMode::Shaded,
            RenderMode::Shaded => RenderMode::Wireframe,
            RenderMode::Wireframe => RenderMode::Editable,
        }
    }
}

pub const SELECTION_TINT: [u8; 3] = [255, 200, 0];

/// Fixed class colors.
pub fn class_color(class: SemanticClass) -> [u8; 3] {
    match class {
        SemanticClass::WallSurface => [200, 200, 200],
        SemanticClass::RoofSurface => [178, 34, 34],
        SemanticClass::GroundSurface => [110, 80, 50],
        SemanticClass::ClosureSurface => [120, 120, 220],
        SemanticClass::OuterCeilingSurface => [90, 160, 90],
        SemanticClass::OuterFloorSurface => [160, 130, 90],
        SemanticClass::Window => [80, 170, 230],
        SemanticClass::Door => [140, 70, 160],
        SemanticClass::BuildingInstallation => [230, 140, 40],
        SemanticClass::Unclassified => [128, 128, 128],
    }
}

/// Perspective camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub eye: Point,
    pub target: Point,
    pub up: Vector,
    pub fov_y_deg: f64,
}

impl Camera {
    pub fn look_at(eye: Point, target: Point, up: Vector) -> Self {
        Camera {
            eye,
            target,
            up,
            fov_y_deg: 45.0,
        }
    }

    /// World-space ray through pixel `(x, y)`; `(0, 0)` is the top-left
    /// corner and `(width / 2, height / 2)` the view center.
    pub fn click_to_ray(&self, x: f64, y: f64, width: f64, height: f64) -> Result<PickRay, ViewerError> {
        if !(0.0..=width).contains(&x) || !(0.0..=height).contains(&y) || width <= 0.0 || height <= 0.0 {
            return Err(ViewerError::OutsideViewport { x, y, width, height });
        }
        let forward = (self.target - self.eye)
            .try_normalize(f64::EPSILON)
            .ok_or(ViewerError::DegenerateCamera)?;
        let right = forward
            .cross(&self.up)
            .try_normalize(f64::EPSILON)
            .ok_or(ViewerError::DegenerateCamera)?;
        let true_up = right.cross(&forward);
        let ndc_x = 2.0 * x / width - 1.0;
        let ndc_y = 1.0 - 2.0 * y / height;
        let half = (self.fov_y_deg.to_radians() / 2.0).tan();
        let dir = forward + right * (ndc_x * half * width / height) + true_up * (ndc_y * half);
        Ok(PickRay::new(self.eye, dir)?)
    }
}

/// Render buffers decoded from a `getMeshBuffers` result.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedBuffers {
    pub revision: u64,
    pub positions: Vec<[f32; 3]>,
    pub indices: Vec<[u32; 3]>,
    pub face_normals: Vec<[f32; 3]>,
    pub classes: Vec<SemanticClass>,
    pub selected: Vec<bool>,
}

fn decode(name: &'static str, text: &str, expected: usize) -> Result<Vec<u8>, ViewerError> {
    let bytes = BASE64.decode(text).map_err(|_| ViewerError::Base64(name))?;
    if bytes.len() != expected {
        return Err(ViewerError::BufferLength {
            name,
            len: bytes.len(),
            expected,
        });
    }
    Ok(bytes)
}

fn triples<T>(bytes: &[u8], conv: impl Fn([u8; 4]) -> T) -> Vec<[T; 3]> {
    bytes
        .chunks_exact(12)
        .map(|c| std::array::from_fn(|k| conv(c[4 * k..4 * k + 4].try_into().unwrap())))
        .collect()
}

impl DecodedBuffers {
    pub fn decode(b: &MeshBuffers) -> Result<Self, ViewerError> {
        let (nv, nf) = (b.vertex_count, b.face_count);
        let positions = decode("positions", &b.positions, nv * 12)?;
        let indices = decode("indices", &b.indices, nf * 12)?;
        let normals = decode("faceNormals", &b.face_normals, nf * 12)?;
        let classes = decode("faceClasses", &b.face_classes, nf)?
            .into_iter()
            .map(|c| {
                b.class_legend
                    .get(c as usize)
                    .and_then(|label| label.parse().ok())
                    .ok_or(ViewerError::UnknownClassCode(c))
            })
            .collect::<Result<_, _>>()?;
        let selected = decode("faceSelected", &b.face_selected, nf)?
            .into_iter()
            .map(|s| s != 0)
            .collect();
        Ok(DecodedBuffers {
            revision: b.revision,
            positions: triples(&positions, f32::from_le_bytes),
            indices: triples(&indices, u32::from_le_bytes),
            face_normals: triples(&normals, f32::from_le_bytes),
            classes,
            selected,
        })
    }

    pub fn triangle_count(&self) -> usize {
        self.indices.len()
    }

    /// Classes present, in legend order.
    pub fn legend(&self) -> Vec<SemanticClass> {
        SemanticClass::ALL
            .into_iter()
            .filter(|c| self.classes.contains(c))
            .collect()
    }

    /// Per-face color: the selection tint wins over the class color.
    pub fn face_colors(&self) -> Vec<[u8; 3]> {
        self.classes
            .iter()
            .zip(&self.selected)
            .map(|(&c, &s)| if s { SELECTION_TINT } else { class_color(c) })
            .collect()
    }
}

/// What the viewer remembers between responses.
#[derive(Debug, Clone, Default)]
pub struct ViewState {
    pub camera: Option<Camera>,
    pub mode: RenderMode,
    pub weight: f64,
    pub last_segmentation: Option<SegmentationRequest>,
    pub revision: u64,
    pub buffers: Option<DecodedBuffers>,
}

impl ViewState {
    pub fn new() -> Self {
        ViewState {
            weight: 0.1,
            ..Default::default()
        }
    }

    pub fn toggle_mode(&mut self) -> RenderMode {
        self.mode = self.mode.next();
        self.mode
    }

    /// Records a response. Returns `false` for a response older than one
    /// already seen; such responses are discarded.
    pub fn observe(&mut self, response: &Response) -> bool {
        if response.revision < self.revision {
            return false;
        }
        self.revision = response.revision;
        true
    }

    /// Whether the held buffers predate the latest observed revision.
    pub fn needs_refetch(&self) -> bool {
        self.buffers.as_ref().is_none_or(|b| b.revision < self.revision)
    }

    /// Stores decoded buffers unless they are stale.
    pub fn accept_buffers(&mut self, buffers: &MeshBuffers) -> Result<bool, ViewerError> {
        if buffers.revision < self.revision {
            return Ok(false);
        }
        self.revision = buffers.revision;
        self.buffers = Some(DecodedBuffers::decode(buffers)?);
        Ok(true)
    }

    pub fn segmentation(&mut self, req: SegmentationRequest) -> Request {
        self.weight = req.weight;
        self.last_segmentation = Some(req);
        Request::RunSegmentation(req)
    }

    /// Slider moved: re-issues the last segmentation with the new weight.
    pub fn set_weight(&mut self, weight: f64) -> Option<Request> {
        self.weight = weight;
        let req = SegmentationRequest {
            weight,
            ..self.last_segmentation?
        };
        Some(self.segmentation(req))
    }

    pub fn pick_request(&self, x: f64, y: f64, width: f64, height: f64) -> Result<Request, ViewerError> {
        let camera = self.camera.ok_or(ViewerError::DegenerateCamera)?;
        let ray = camera.click_to_ray(x, y, width, height)?;
        Ok(Request::Pick(RayMessage {
            origin: ray.origin().coords.into(),
            direction: (*ray.direction()).into(),
        }))
    }
}
