//! CityGML 2.0 LOD3 output.
//!
//! The document holds a single `bldg:Building`. Triangles are grouped by
//! semantic class; every triangle becomes one `gml:Polygon` whose exterior
//! ring lists the three corners in mesh winding order and then repeats the
//! first. Unclassified faces are written as building installations.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_base_graph, FaceGraph};
use crate::mesh::{face_normal, Bounds, Point, TriangleMesh};
use crate::semantics::{SemanticClass, SemanticMap};

pub const NS_CORE: &str = "http://www.opengis.net/citygml/2.0";
pub const NS_BLDG: &str = "http://www.opengis.net/citygml/building/2.0";
pub const NS_GML: &str = "http://www.opengis.net/gml";
pub const GENERATOR: &str = "citymesh";

/// Two ring points closer than this fraction of the bounds diagonal count as
/// the same point.
pub const DUPLICATE_POINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot export an empty mesh")]
    EmptyMesh,
    #[error("semantic map covers {map} faces but mesh has {mesh}")]
    MapMismatch { map: usize, mesh: usize },
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("XML error: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("malformed gml:pos `{0}`")]
    BadPos(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    RingNotClosed,
    DuplicatePoint,
    Collinear,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::RingNotClosed => "RING_NOT_CLOSED",
            IssueCode::DuplicatePoint => "DUPLICATE_POINT",
            IssueCode::Collinear => "COLLINEAR",
        }
    }
}

impl std::fmt::Display for IssueCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceIssue {
    pub face: usize,
    pub code: IssueCode,
}

fn triangle_issue(tri: [Point; 3], scale: f64) -> Option<IssueCode> {
    let tol = DUPLICATE_POINT_TOLERANCE * scale;
    let [a, b, c] = tri;
    if (a - b).norm() <= tol || (b - c).norm() <= tol || (a - c).norm() <= tol {
        return Some(IssueCode::DuplicatePoint);
    }
    let area = 0.5 * (b - a).cross(&(c - a)).norm();
    if area < crate::mesh::DEGENERATE_AREA_FACTOR * scale * scale || face_normal(&a, &b, &c).is_err() {
        return Some(IssueCode::Collinear);
    }
    None
}

/// Checks raw triangles (e.g. straight from an OBJ file, before degenerate
/// faces are dropped). Self-intersection between faces is not checked.
pub fn validate_triangles(vertices: &[Point], triangles: &[[u32; 3]]) -> Vec<FaceIssue> {
    let scale = Bounds::of(vertices).map_or(0.0, |b| b.diagonal());
    triangles
        .iter()
        .enumerate()
        .filter_map(|(face, tri)| {
            let pts = tri.map(|i| vertices[i as usize]);
            triangle_issue(pts, scale).map(|code| FaceIssue { face, code })
        })
        .collect()
}

pub fn validate_faces(mesh: &TriangleMesh) -> Vec<FaceIssue> {
    let tris: Vec<[u32; 3]> = mesh.faces().iter().map(|f| f.vertices()).collect();
    validate_triangles(mesh.vertices(), &tris)
}

/// Checks a ring read back from a document.
pub fn validate_ring(ring: &[Point]) -> Vec<IssueCode> {
    let mut issues = Vec::new();
    if ring.len() < 4 || ring.first() != ring.last() {
        issues.push(IssueCode::RingNotClosed);
    }
    if ring.len() >= 3 {
        let scale = Bounds::of(ring).map_or(0.0, |b| b.diagonal());
        if let Some(code) = triangle_issue([ring[0], ring[1], ring[2]], scale) {
            issues.push(code);
        }
    }
    issues
}

/// Closed ring of one triangle: `[a, b, c, a]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleRing {
    pub face: u32,
    pub positions: [Point; 4],
}

impl TriangleRing {
    pub fn new(face: u32, [a, b, c]: [Point; 3]) -> Self {
        TriangleRing {
            face,
            positions: [a, b, c, a],
        }
    }
}

/// All triangles of one class, written as one CityGML feature.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGroup {
    pub class: SemanticClass,
    pub rings: Vec<TriangleRing>,
    /// Openings nested inside this surface (wall surfaces, nested mode only).
    pub openings: Vec<SurfaceGroup>,
}

impl SurfaceGroup {
    fn new(mesh: &TriangleMesh, class: SemanticClass, faces: &[u32]) -> Self {
        SurfaceGroup {
            class,
            rings: faces
                .iter()
                .map(|&f| TriangleRing::new(f, mesh.triangle(f as usize)))
                .collect(),
            openings: Vec::new(),
        }
    }

    fn ring_count(&self) -> usize {
        self.rings.len() + self.openings.iter().map(SurfaceGroup::ring_count).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BuildingModel {
    /// Building installations, then unclassified faces.
    pub installations: Vec<SurfaceGroup>,
    pub boundaries: Vec<SurfaceGroup>,
    /// Openings placed directly under the building.
    pub openings: Vec<SurfaceGroup>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SchemaLocations {
    /// Version 1.0 schema documents, as in the reference output.
    #[default]
    Legacy,
    /// Version 2.0 schema documents matching the 2.0 namespaces.
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OpeningPlacement {
    /// `bldg:opening` directly under `bldg:Building`.
    #[default]
    Flat,
    /// Each opening patch nested in the wall surface it is most connected to.
    Nested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ExportOptions {
    pub schema: SchemaLocations,
    pub openings: OpeningPlacement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CityDocument {
    pub name: String,
    pub buildings: Vec<BuildingModel>,
    pub schema: SchemaLocations,
    /// Faces written as installations because they carried no class.
    pub unclassified: usize,
}

const BOUNDARY_ORDER: [SemanticClass; 6] = [
    SemanticClass::WallSurface,
    SemanticClass::RoofSurface,
    SemanticClass::GroundSurface,
    SemanticClass::ClosureSurface,
    SemanticClass::OuterCeilingSurface,
    SemanticClass::OuterFloorSurface,
];
const OPENING_ORDER: [SemanticClass; 2] = [SemanticClass::Window, SemanticClass::Door];

/// Connected components of `faces` using only graph edges inside the set.
fn components_within(graph: &FaceGraph, faces: &[u32]) -> Vec<Vec<u32>> {
    let mut inside = vec![false; graph.node_count()];
    for &f in faces {
        inside[f as usize] = true;
    }
    let mut seen = vec![false; graph.node_count()];
    let mut out = Vec::new();
    for &start in faces {
        if seen[start as usize] {
            continue;
        }
        seen[start as usize] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(f) = stack.pop() {
            comp.push(f);
            for &n in graph.neighbors(f as usize) {
                if inside[n as usize] && !seen[n as usize] {
                    seen[n as usize] = true;
                    stack.push(n);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

impl CityDocument {
    /// Groups the mesh faces by class. `graph` is only consulted for nested
    /// opening placement; the base graph is used when none is given.
    pub fn build(
        mesh: &TriangleMesh,
        map: &SemanticMap,
        name: &str,
        graph: Option<&FaceGraph>,
        options: &ExportOptions,
    ) -> Result<Self, ExportError> {
        if mesh.is_empty() {
            return Err(ExportError::EmptyMesh);
        }
        if map.face_count() != mesh.face_count() {
            return Err(ExportError::MapMismatch {
                map: map.face_count(),
                mesh: mesh.face_count(),
            });
        }

        let mut building = BuildingModel::default();
        for class in [SemanticClass::BuildingInstallation, SemanticClass::Unclassified] {
            let faces = map.faces_of(class);
            if !faces.is_empty() {
                building.installations.push(SurfaceGroup::new(mesh, class, &faces));
            }
        }

        let nested = options.openings == OpeningPlacement::Nested && map.count(SemanticClass::WallSurface) > 0;
        let owned_graph;
        let graph = match graph {
            Some(g) => g,
            None if nested => {
                owned_graph = build_base_graph(mesh);
                &owned_graph
            }
            None => {
                owned_graph = FaceGraph::from_adjacency(Vec::new());
                &owned_graph
            }
        };

        for class in BOUNDARY_ORDER {
            let faces = map.faces_of(class);
            if faces.is_empty() {
                continue;
            }
            if nested && class == SemanticClass::WallSurface {
                for comp in components_within(graph, &faces) {
                    building.boundaries.push(SurfaceGroup::new(mesh, class, &comp));
                }
            } else {
                building.boundaries.push(SurfaceGroup::new(mesh, class, &faces));
            }
        }

        for class in OPENING_ORDER {
            let faces = map.faces_of(class);
            if faces.is_empty() {
                continue;
            }
            if !nested {
                building.openings.push(SurfaceGroup::new(mesh, class, &faces));
                continue;
            }
            let first_wall = building
                .boundaries
                .iter()
                .position(|g| g.class == SemanticClass::WallSurface)
                .expect("nested placement requires wall faces");
            let mut owner = vec![None; mesh.face_count()];
            for (gi, g) in building.boundaries.iter().enumerate() {
                if g.class == SemanticClass::WallSurface {
                    for r in &g.rings {
                        owner[r.face as usize] = Some(gi);
                    }
                }
            }
            for comp in components_within(graph, &faces) {
                let mut votes = vec![0usize; building.boundaries.len()];
                for &f in &comp {
                    for &n in graph.neighbors(f as usize) {
                        if let Some(gi) = owner[n as usize] {
                            votes[gi] += 1;
                        }
                    }
                }
                // most shared adjacency wins, earliest wall group on ties;
                // with no adjacency at all, the first wall group
                let host = votes
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 0)
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .map_or(first_wall, |(gi, _)| gi);
                building.boundaries[host]
                    .openings
                    .push(SurfaceGroup::new(mesh, class, &comp));
            }
        }

        let doc = CityDocument {
            name: name.to_string(),
            buildings: vec![building],
            schema: options.schema,
            unclassified: map.count(SemanticClass::Unclassified),
        };
        debug_assert_eq!(doc.ring_count(), mesh.face_count());
        if doc.unclassified > 0 {
            log::warn!("{} unclassified face(s) exported as BuildingInstallation", doc.unclassified);
        }
        Ok(doc)
    }

    pub fn ring_count(&self) -> usize {
        self.buildings
            .iter()
            .flat_map(|b| b.installations.iter().chain(&b.boundaries).chain(&b.openings))
            .map(SurfaceGroup::ring_count)
            .sum()
    }

    pub fn to_xml(&self) -> String {
        let mut w = XmlWriter::default();
        w.out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        w.out.push_str(&root_open_tag(self.schema));
        w.out.push('\n');
        w.depth = 1;
        w.leaf("gml:description", GENERATOR);
        w.leaf("gml:name", &self.name);
        for b in &self.buildings {
            w.open("core:cityObjectMember");
            w.open("bldg:Building");
            for g in &b.installations {
                w.open("bldg:outerBuildingInstallation");
                w.open("bldg:BuildingInstallation");
                w.multi_surface("bldg:lod3Geometry", g);
                w.close("bldg:BuildingInstallation");
                w.close("bldg:outerBuildingInstallation");
            }
            for g in &b.boundaries {
                w.open("bldg:boundedBy");
                w.open(&format!("bldg:{}", g.class));
                w.multi_surface("bldg:lod3MultiSurface", g);
                for o in &g.openings {
                    w.opening(o);
                }
                w.close(&format!("bldg:{}", g.class));
                w.close("bldg:boundedBy");
            }
            for o in &b.openings {
                w.opening(o);
            }
            w.close("bldg:Building");
            w.close("core:cityObjectMember");
        }
        w.depth = 0;
        w.close("CityModel");
        w.out
    }
}

/// Builds and serializes in one step.
pub fn export_citygml(
    mesh: &TriangleMesh,
    map: &SemanticMap,
    name: &str,
    graph: Option<&FaceGraph>,
    options: &ExportOptions,
) -> Result<String, ExportError> {
    Ok(CityDocument::build(mesh, map, name, graph, options)?.to_xml())
}

const SCHEMA_MODULES: [(&str, &str); 11] = [
    ("relief", "relief.xsd"),
    ("landuse", "landUse.xsd"),
    ("building", "building.xsd"),
    ("cityobjectgroup", "cityObjectGroup.xsd"),
    ("cityfurniture", "cityFurniture.xsd"),
    ("appearance", "appearance.xsd"),
    ("texturedsurface", "texturedSurface.xsd"),
    ("transportation", "transportation.xsd"),
    ("waterbody", "waterBody.xsd"),
    ("vegetation", "vegetation.xsd"),
    ("generics", "generics.xsd"),
];

fn root_open_tag(schema: SchemaLocations) -> String {
    let mut s = String::from("<CityModel xmlns=\"http://www.opengis.net/citygml/2.0\"\n");
    for (prefix, uri) in [
        ("xsi", "http://www.w3.org/2001/XMLSchema-instance"),
        ("xlink", "http://www.w3.org/1999/xlink"),
        ("smil20", "http://www.w3.org/2001/SMIL20/"),
        ("blgd", NS_BLDG),
        ("frn", "http://www.opengis.net/citygml/cityfurniture/2.0"),
        ("grp", "http://www.opengis.net/citygml/cityobjectgroup/2.0"),
        ("luse", "http://www.opengis.net/citygml/landuse/2.0"),
        ("tex", "http://www.opengis.net/citygml/texturedsurface/2.0"),
        ("tun", "http://www.opengis.net/citygml/tunnel/2.0"),
        ("wtr", "http://www.opengis.net/citygml/waterbody/2.0"),
        ("core", NS_CORE),
        ("bldg", NS_BLDG),
        ("gml", NS_GML),
    ] {
        let _ = writeln!(s, "  xmlns:{prefix}=\"{uri}\"");
    }
    let version = match schema {
        SchemaLocations::Legacy => "1.0",
        SchemaLocations::Corrected => "2.0",
    };
    let pairs: Vec<String> = SCHEMA_MODULES
        .iter()
        .map(|(module, file)| {
            format!("http://www.opengis.net/citygml/{module}/2.0 http://schemas.opengis.net/citygml/{module}/{version}/{file}")
        })
        .collect();
    let _ = write!(s, "  xsi:schemaLocation=\"{}\">", pairs.join("\n  "));
    s
}

pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_pos(p: &Point) -> String {
    format!("{} {} {}", p.x, p.y, p.z)
}

#[derive(Default)]
struct XmlWriter {
    out: String,
    depth: usize,
}

impl XmlWriter {
    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn open(&mut self, tag: &str) {
        self.indent();
        let _ = writeln!(self.out, "<{tag}>");
        self.depth += 1;
    }

    fn open_attr(&mut self, tag: &str, name: &str, value: &str) {
        self.indent();
        let _ = writeln!(self.out, "<{tag} {name}=\"{}\">", escape_text(value));
        self.depth += 1;
    }

    fn close(&mut self, tag: &str) {
        self.depth = self.depth.saturating_sub(1);
        self.indent();
        let _ = writeln!(self.out, "</{tag}>");
    }

    fn leaf(&mut self, tag: &str, text: &str) {
        self.indent();
        let _ = writeln!(self.out, "<{tag}>{}</{tag}>", escape_text(text));
    }

    fn multi_surface(&mut self, property: &str, group: &SurfaceGroup) {
        self.open(property);
        self.open("gml:MultiSurface");
        for ring in &group.rings {
            self.open("gml:surfaceMember");
            self.open_attr("gml:Polygon", "gml:id", &format!("{}_{}", group.class, ring.face));
            self.open("gml:exterior");
            self.open("gml:LinearRing");
            for p in &ring.positions {
                self.leaf("gml:pos", &format_pos(p));
            }
            self.close("gml:LinearRing");
            self.close("gml:exterior");
            self.close("gml:Polygon");
            self.close("gml:surfaceMember");
        }
        self.close("gml:MultiSurface");
        self.close(property);
    }

    fn opening(&mut self, group: &SurfaceGroup) {
        self.open("bldg:opening");
        self.open(&format!("bldg:{}", group.class));
        self.multi_surface("bldg:lod3MultiSurface", group);
        self.close(&format!("bldg:{}", group.class));
        self.close("bldg:opening");
    }
}

/// A polygon read back from a document.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPolygon {
    pub id: Option<String>,
    /// Local name of the nearest enclosing feature, e.g. `WallSurface`.
    pub feature: String,
    pub pos_text: Vec<String>,
    pub positions: Vec<Point>,
}

/// Reads every `gml:Polygon` exterior ring from a CityGML document.
pub fn read_polygons(xml: &str) -> Result<Vec<ParsedPolygon>, ExportError> {
    let doc = roxmltree::Document::parse(xml)?;
    let mut out = Vec::new();
    for poly in doc.descendants().filter(|n| n.has_tag_name((NS_GML, "Polygon"))) {
        let feature = poly
            .ancestors()
            .find(|a| a.tag_name().namespace() == Some(NS_BLDG) && a.tag_name().name().chars().next().is_some_and(char::is_uppercase))
            .map(|a| a.tag_name().name().to_string())
            .unwrap_or_default();
        let mut pos_text = Vec::new();
        let mut positions = Vec::new();
        let exterior = poly.descendants().filter(|n| n.has_tag_name((NS_GML, "pos")));
        for pos in exterior {
            let text = pos.text().unwrap_or("").to_string();
            let coords: Vec<f64> = text
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| ExportError::BadPos(text.clone()))?;
            if coords.len() != 3 {
                return Err(ExportError::BadPos(text));
            }
            positions.push(Point::new(coords[0], coords[1], coords[2]));
            pos_text.push(text);
        }
        out.push(ParsedPolygon {
            id: poly.attribute((NS_GML, "id")).map(str::to_string),
            feature,
            pos_text,
            positions,
        });
    }
    Ok(out)
}
