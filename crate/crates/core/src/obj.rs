//! Wavefront OBJ reader.
//!
//! Only `v` positions and `f` records contribute geometry. Texture
//! coordinates, authored normals, groups, smoothing and material records are
//! accepted and skipped. Polygons are fan-triangulated from their first
//! vertex; normals are always recomputed from the winding.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use thiserror::Error;

use crate::mesh::{MeshError, Point, TriangleMesh};

#[derive(Debug, Error)]
pub enum ObjError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no face records found")]
    NoFaces,
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn parse_err(line: usize, message: impl Into<String>) -> ObjError {
    ObjError::Parse {
        line,
        message: message.into(),
    }
}

/// Raw triangulated OBJ content before degenerate filtering.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjData {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[u32; 3]>,
    /// Number of `f` records read.
    pub polygons: usize,
}

/// Parses OBJ text into positions and fan-triangulated index triples.
pub fn parse_obj<R: BufRead>(reader: R) -> Result<ObjData, ObjError> {
    let mut data = ObjData::default();
    let mut corners: Vec<u32> = Vec::new();

    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        match keyword {
            "v" => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| parse_err(line_no, "vertex needs three coordinates"))?;
                    *c = tok
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_err(line_no, format!("invalid coordinate `{tok}`")))?;
                }
                data.vertices.push(Point::from(coords));
            }
            "f" => {
                corners.clear();
                for tok in tokens {
                    corners.push(resolve_index(tok, data.vertices.len(), line_no)?);
                }
                if corners.len() < 3 {
                    return Err(parse_err(
                        line_no,
                        format!("face has {} vertices, need at least 3", corners.len()),
                    ));
                }
                data.polygons += 1;
                for k in 1..corners.len() - 1 {
                    data.triangles.push([corners[0], corners[k], corners[k + 1]]);
                }
            }
            _ => {}
        }
    }

    if data.polygons == 0 {
        return Err(ObjError::NoFaces);
    }
    Ok(data)
}

/// Resolves a face corner token (`i`, `i/t`, `i//n`, `i/t/n`) to a 0-based
/// vertex index. Negative indices count back from the last vertex read.
fn resolve_index(token: &str, vertex_count: usize, line: usize) -> Result<u32, ObjError> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head
        .parse()
        .map_err(|_| parse_err(line, format!("invalid vertex index `{token}`")))?;
    let resolved = match raw {
        0 => None,
        r if r > 0 => Some(r - 1),
        r => Some(vertex_count as i64 + r),
    };
    resolved
        .filter(|&i| i >= 0 && (i as usize) < vertex_count)
        .map(|i| i as u32)
        .ok_or_else(|| {
            parse_err(
                line,
                format!("vertex index {raw} out of range ({vertex_count} vertices defined)"),
            )
        })
}

pub fn load_obj<R: BufRead>(reader: R) -> Result<TriangleMesh, ObjError> {
    let data = parse_obj(reader)?;
    Ok(TriangleMesh::from_triangles(data.vertices, &data.triangles)?)
}

pub fn load_obj_str(text: &str) -> Result<TriangleMesh, ObjError> {
    load_obj(text.as_bytes())
}

pub fn load_obj_file(path: impl AsRef<Path>) -> Result<TriangleMesh, ObjError> {
    load_obj(BufReader::new(File::open(path)?))
}

pub fn parse_obj_file(path: impl AsRef<Path>) -> Result<ObjData, ObjError> {
    parse_obj(BufReader::new(File::open(path)?))
}

/// Serializes a mesh as OBJ (`v` and `f` records only).
pub fn write_obj(mesh: &TriangleMesh) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in mesh.faces() {
        let [a, b, c] = f.vertices();
        let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    out
}

/// Reads all bytes; used when the caller also needs a content hash.
pub fn read_bytes(path: impl AsRef<Path>) -> io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    File::open(path)?.read_to_end(&mut buf)?;
    Ok(buf)
}
