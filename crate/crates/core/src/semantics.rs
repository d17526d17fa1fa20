//! CityGML semantic classes and the face → class map.

use std::fmt;
use std::io::{self, BufRead};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::TriangleMesh;
use crate::selection::Selection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub enum SemanticClass {
    WallSurface,
    RoofSurface,
    GroundSurface,
    ClosureSurface,
    OuterCeilingSurface,
    OuterFloorSurface,
    Window,
    Door,
    BuildingInstallation,
    #[default]
    Unclassified,
}

impl SemanticClass {
    pub const ALL: [SemanticClass; 10] = [
        SemanticClass::WallSurface,
        SemanticClass::RoofSurface,
        SemanticClass::GroundSurface,
        SemanticClass::ClosureSurface,
        SemanticClass::OuterCeilingSurface,
        SemanticClass::OuterFloorSurface,
        SemanticClass::Window,
        SemanticClass::Door,
        SemanticClass::BuildingInstallation,
        SemanticClass::Unclassified,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SemanticClass::WallSurface => "WallSurface",
            SemanticClass::RoofSurface => "RoofSurface",
            SemanticClass::GroundSurface => "GroundSurface",
            SemanticClass::ClosureSurface => "ClosureSurface",
            SemanticClass::OuterCeilingSurface => "OuterCeilingSurface",
            SemanticClass::OuterFloorSurface => "OuterFloorSurface",
            SemanticClass::Window => "Window",
            SemanticClass::Door => "Door",
            SemanticClass::BuildingInstallation => "BuildingInstallation",
            SemanticClass::Unclassified => "Unclassified",
        }
    }

    /// Stable small integer used in render buffers.
    pub fn code(self) -> u8 {
        SemanticClass::ALL.iter().position(|&c| c == self).unwrap() as u8
    }

    pub fn is_boundary_surface(self) -> bool {
        matches!(
            self,
            SemanticClass::WallSurface
                | SemanticClass::RoofSurface
                | SemanticClass::GroundSurface
                | SemanticClass::ClosureSurface
                | SemanticClass::OuterCeilingSurface
                | SemanticClass::OuterFloorSurface
        )
    }

    pub fn is_opening(self) -> bool {
        matches!(self, SemanticClass::Window | SemanticClass::Door)
    }
}

impl fmt::Display for SemanticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unknown semantic class `{0}`")]
pub struct UnknownClass(pub String);

impl FromStr for SemanticClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SemanticClass::ALL
            .iter()
            .copied()
            .find(|c| c.label() == s)
            .ok_or_else(|| UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: face index {index} out of range for mesh with {count} faces")]
    FaceOutOfRange {
        line: usize,
        index: usize,
        count: usize,
    },
    #[error("selection covers {selection} faces but map covers {map}")]
    MeshMismatch { selection: usize, map: usize },
}

/// Total assignment of a class to every face (default `Unclassified`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticMap {
    classes: Vec<SemanticClass>,
}

impl SemanticMap {
    pub fn new(face_count: usize) -> Self {
        SemanticMap {
            classes: vec![SemanticClass::Unclassified; face_count],
        }
    }

    pub fn from_classes(classes: Vec<SemanticClass>) -> Self {
        SemanticMap { classes }
    }

    pub fn face_count(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, face: usize) -> SemanticClass {
        self.classes[face]
    }

    pub fn classes(&self) -> &[SemanticClass] {
        &self.classes
    }

    pub fn set(&mut self, face: usize, class: SemanticClass) {
        self.classes[face] = class;
    }

    /// Assigns `class` to every selected face; later assignments win.
    pub fn assign(&mut self, sel: &Selection, class: SemanticClass) -> Result<(), SemanticsError> {
        if sel.face_count() != self.classes.len() {
            return Err(SemanticsError::MeshMismatch {
                selection: sel.face_count(),
                map: self.classes.len(),
            });
        }
        for &f in sel.faces() {
            self.classes[f as usize] = class;
        }
        Ok(())
    }

    pub fn count(&self, class: SemanticClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    /// Faces carrying `class`, ascending.
    pub fn faces_of(&self, class: SemanticClass) -> Vec<u32> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == class)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// `faceIndex<TAB>classLabel` lines for every classified face.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.classes.iter().enumerate() {
            if *c != SemanticClass::Unclassified {
                out.push_str(&format!("{i}\t{c}\n"));
            }
        }
        out
    }

    /// Reads a sidecar for a mesh with `face_count` faces. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn read_sidecar<R: BufRead>(reader: R, face_count: usize) -> Result<Self, SemanticsError> {
        let mut map = SemanticMap::new(face_count);
        for (n, line) in reader.lines().enumerate() {
            let line_no = n + 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (index, label) = line.split_once('\t').ok_or_else(|| SemanticsError::Parse {
                line: line_no,
                message: "expected `faceIndex<TAB>classLabel`".into(),
            })?;
            let index: usize = index.trim().parse().map_err(|_| SemanticsError::Parse {
                line: line_no,
                message: format!("invalid face index `{index}`"),
            })?;
            let class: SemanticClass = label.trim().parse().map_err(|e: UnknownClass| SemanticsError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            if index >= face_count {
                return Err(SemanticsError::FaceOutOfRange {
                    line: line_no,
                    index,
                    count: face_count,
                });
            }
            map.classes[index] = class;
        }
        Ok(map)
    }
}

/// Angular tolerances (degrees) for [`suggest_classes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuggestThresholds {
    pub roof: f64,
    pub ground: f64,
    pub wall: f64,
}

impl Default for SuggestThresholds {
    fn default() -> Self {
        SuggestThresholds {
            roof: 45.0,
            ground: 45.0,
            wall: 45.0,
        }
    }
}

/// Classification of a normal making angle `theta` (degrees) with UP.
/// Bands are tested roof, ground, wall in that order.
pub fn classify_angle(theta: f64, t: &SuggestThresholds) -> SemanticClass {
    if theta <= t.roof {
        SemanticClass::RoofSurface
    } else if theta >= 180.0 - t.ground {
        SemanticClass::GroundSurface
    } else if (theta - 90.0).abs() <= t.wall {
        SemanticClass::WallSurface
    } else {
        SemanticClass::Unclassified
    }
}

/// Heuristic classification by normal direction relative to the mesh UP
/// vector. Only ever proposes roof, ground and wall surfaces.
pub fn suggest_classes(mesh: &TriangleMesh, thresholds: &SuggestThresholds) -> SemanticMap {
    let up = mesh.up();
    let classes = mesh
        .faces()
        .iter()
        .map(|f| {
            let theta = f.normal().dot(up).clamp(-1.0, 1.0).acos().to_degrees();
            classify_angle(theta, thresholds)
        })
        .collect();
    SemanticMap { classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mesh::Vector;

    #[test]
    fn labels_round_trip() {
        for c in SemanticClass::ALL {
            assert_eq!(c.label().parse::<SemanticClass>().unwrap(), c);
        }
        assert!("Roof".parse::<SemanticClass>().is_err());
    }

    #[test]
    fn reassignment_overwrites() {
        let mut map = SemanticMap::new(4);
        map.assign(&Selection::from_faces(4, [0, 1, 2]).unwrap(), SemanticClass::RoofSurface)
            .unwrap();
        map.assign(&Selection::from_faces(4, [1]).unwrap(), SemanticClass::Window)
            .unwrap();
        assert_eq!(map.get(1), SemanticClass::Window);
        assert_eq!(map.get(0), SemanticClass::RoofSurface);
        assert_eq!(map.get(3), SemanticClass::Unclassified);
    }

    #[test]
    fn empty_assignment_is_noop() {
        let mut map = SemanticMap::new(4);
        map.set(2, SemanticClass::Door);
        let before = map.clone();
        map.assign(&Selection::empty(4), SemanticClass::WallSurface).unwrap();
        assert_eq!(map, before);
        assert!(map.assign(&Selection::empty(5), SemanticClass::WallSurface).is_err());
    }

    #[test]
    fn suggest_on_box() {
        let mesh = fixtures::unit_cube();
        let map = suggest_classes(&mesh, &SuggestThresholds::default());
        for (i, f) in mesh.faces().iter().enumerate() {
            let expected = match f.normal().z {
                z if z > 0.5 => SemanticClass::RoofSurface,
                z if z < -0.5 => SemanticClass::GroundSurface,
                _ => SemanticClass::WallSurface,
            };
            assert_eq!(map.get(i), expected);
        }
    }

    #[test]
    fn suggest_pitched_roof() {
        let house = fixtures::gabled_house(30.0);
        let map = suggest_classes(&house, &SuggestThresholds::default());
        for (i, f) in house.faces().iter().enumerate() {
            if f.normal().z > 0.5 {
                let theta = f.normal().z.acos().to_degrees();
                assert!((theta - 30.0).abs() < 1e-9);
                assert_eq!(map.get(i), SemanticClass::RoofSurface);
            }
        }
    }

    #[test]
    fn angle_outside_all_bands() {
        let t = SuggestThresholds {
            roof: 45.0,
            ground: 45.0,
            wall: 30.0,
        };
        assert_eq!(classify_angle(50.0, &t), SemanticClass::Unclassified);
        // with the default wall band of ±45° around horizontal, 50° is a wall
        assert_eq!(classify_angle(50.0, &SuggestThresholds::default()), SemanticClass::WallSurface);
        assert_eq!(classify_angle(45.0, &SuggestThresholds::default()), SemanticClass::RoofSurface);
    }

    #[test]
    fn suggest_honours_up_vector() {
        let mesh = fixtures::unit_cube().with_up(Vector::x()).unwrap();
        let map = suggest_classes(&mesh, &SuggestThresholds::default());
        for (i, f) in mesh.faces().iter().enumerate() {
            if f.normal().x > 0.5 {
                assert_eq!(map.get(i), SemanticClass::RoofSurface);
            }
        }
    }

    #[test]
    fn sidecar_round_trip_and_errors() {
        let mut map = SemanticMap::new(5);
        map.set(0, SemanticClass::WallSurface);
        map.set(3, SemanticClass::BuildingInstallation);
        let text = map.to_sidecar();
        assert_eq!(text, "0\tWallSurface\n3\tBuildingInstallation\n");
        assert_eq!(SemanticMap::read_sidecar(text.as_bytes(), 5).unwrap(), map);

        let err = SemanticMap::read_sidecar("9999\tWindow\n".as_bytes(), 12).unwrap_err();
        assert!(err.to_string().contains("9999"));
        assert!(matches!(
            SemanticMap::read_sidecar("1 Window\n".as_bytes(), 12),
            Err(SemanticsError::Parse { line: 1, .. })
        ));
        assert!(SemanticMap::read_sidecar("# header\n\n1\tBogus\n".as_bytes(), 12).is_err());
    }
}
