mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use citymesh::citygml::{
    export_citygml, read_polygons, validate_faces, ExportError, ExportOptions, IssueCode, OpeningPlacement,
    SchemaLocations, NS_BLDG, NS_GML,
};
use citymesh::fixtures;
use citymesh::mesh::Vector;
use citymesh::selection::Selection;
use citymesh::semantics::{suggest_classes, SemanticClass, SemanticMap, SemanticsError, SuggestThresholds};
use citymesh::{build_base_graph, weld_graph};

use common::*;

#[test]
fn reassignment_is_last_write_wins() {
    let mut map = SemanticMap::new(12);
    map.assign(&Selection::from_faces(12, [2, 3]).unwrap(), SemanticClass::RoofSurface).unwrap();
    map.assign(&Selection::from_faces(12, [3]).unwrap(), SemanticClass::Window).unwrap();
    assert_eq!(map.get(2), SemanticClass::RoofSurface);
    assert_eq!(map.get(3), SemanticClass::Window);
    let before = map.clone();
    map.assign(&Selection::empty(12), SemanticClass::Door).unwrap();
    assert_eq!(map, before);
    assert!(matches!(
        map.assign(&Selection::all(13), SemanticClass::Door),
        Err(SemanticsError::MeshMismatch { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_assigns_fold(seed in any::<u64>(), n in 1usize..60, steps in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut map = SemanticMap::new(n);
        let mut fold = vec![SemanticClass::Unclassified; n];
        for _ in 0..steps {
            let faces: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.3)).collect();
            let class = SemanticClass::ALL[rng.gen_range(0..10)];
            map.assign(&Selection::from_faces(n, faces.iter().copied()).unwrap(), class).unwrap();
            for f in faces {
                fold[f as usize] = class;
            }
        }
        prop_assert_eq!(map.classes(), fold.as_slice());
        let back = SemanticMap::read_sidecar(map.to_sidecar().as_bytes(), n).unwrap();
        prop_assert_eq!(back, map);
    }
}

#[test]
fn sidecar_format() {
    let mut map = SemanticMap::new(5);
    map.set(1, SemanticClass::WallSurface);
    map.set(4, SemanticClass::Door);
    assert_eq!(map.to_sidecar(), "1\tWallSurface\n4\tDoor\n");
    let err = SemanticMap::read_sidecar("9999\tWindow\n".as_bytes(), 12).unwrap_err();
    assert!(err.to_string().contains("9999"));
    assert!(SemanticMap::read_sidecar("1\tRoof\n".as_bytes(), 12).is_err());
}

#[test]
fn suggestions_on_box_and_gable() {
    let s = suggest_classes(&fixtures::box_house(), &SuggestThresholds::default());
    let house = fixtures::box_house();
    for f in 0..12 {
        let n = normal(&house, f);
        let want = if n.z > 0.9 {
            SemanticClass::RoofSurface
        } else if n.z < -0.9 {
            SemanticClass::GroundSurface
        } else {
            SemanticClass::WallSurface
        };
        assert_eq!(s.get(f), want);
    }
    let gable = fixtures::gabled_house(30.0);
    let s = suggest_classes(&gable, &SuggestThresholds::default());
    for f in 0..gable.face_count() {
        let theta = normal(&gable, f).dot(&Vector::z()).clamp(-1.0, 1.0).acos().to_degrees();
        if (theta - 30.0).abs() < 1e-9 {
            assert_eq!(s.get(f), SemanticClass::RoofSurface);
        }
        assert!(!matches!(
            s.get(f),
            SemanticClass::Window | SemanticClass::Door | SemanticClass::ClosureSurface | SemanticClass::BuildingInstallation
        ));
    }
    let steep = fixtures::gabled_house(50.0);
    let tight = SuggestThresholds {
        roof: 45.0,
        ground: 45.0,
        wall: 30.0,
    };
    let s = suggest_classes(&steep, &tight);
    let roof_face = (0..steep.face_count()).find(|&f| (normal(&steep, f).z - 50f64.to_radians().cos()).abs() < 1e-9).unwrap();
    assert_eq!(s.get(roof_face), SemanticClass::Unclassified);
}

#[test]
fn window_triangle_shape() {
    let tri = fixtures::single_triangle();
    let map = SemanticMap::from_classes(vec![SemanticClass::Window]);
    let xml = export_citygml(&tri, &map, "w", None, &ExportOptions::default()).unwrap();
    let doc = roxmltree::Document::parse(&xml).unwrap();
    let window = doc.descendants().find(|n| n.has_tag_name((NS_BLDG, "Window"))).unwrap();
    assert_eq!(window.parent().unwrap().tag_name().name(), "opening");
    assert_eq!(window.parent().unwrap().parent().unwrap().tag_name().name(), "Building");
    let pos: Vec<_> = window.descendants().filter(|n| n.has_tag_name((NS_GML, "pos"))).collect();
    assert_eq!(pos.len(), 4);
    assert_eq!(pos[0].text(), pos[3].text());
}

#[test]
fn sample_installation_ring_text() {
    let tri = fixtures::single_triangle();
    let map = SemanticMap::from_classes(vec![SemanticClass::BuildingInstallation]);
    let xml = export_citygml(&tri, &map, "sample", None, &ExportOptions::default()).unwrap();
    assert!(xml.starts_with("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<CityModel"));
    let polys = read_polygons(&xml).unwrap();
    assert_eq!(polys[0].feature, "BuildingInstallation");
    assert_eq!(
        polys[0].pos_text,
        ["-124.189 -258.724 12", "-119.199 -258.724 16.99", "-91.232 -258.724 12", "-124.189 -258.724 12"]
    );
    assert!(xml.contains("<gml:name>sample</gml:name>"));
}

#[test]
fn element_order_and_grouping() {
    let house = fixtures::gabled_house(30.0);
    let n = house.face_count();
    let classes = (0..n)
        .map(|f| match normal(&house, f) {
            v if v.z > 0.3 => SemanticClass::RoofSurface,
            v if v.z < -0.9 => SemanticClass::GroundSurface,
            _ if f % 5 == 0 => SemanticClass::Door,
            _ if f % 7 == 0 => SemanticClass::Unclassified,
            _ => SemanticClass::WallSurface,
        })
        .collect();
    let map = SemanticMap::from_classes(classes);
    let xml = export_citygml(&house, &map, "order", None, &ExportOptions::default()).unwrap();
    let doc = roxmltree::Document::parse(&xml).unwrap();
    let building = doc.descendants().find(|n| n.has_tag_name((NS_BLDG, "Building"))).unwrap();
    let kids: Vec<String> = building
        .children()
        .filter(|c| c.is_element())
        .map(|c| {
            let inner = c.children().find(|k| k.is_element()).unwrap();
            format!("{}/{}", c.tag_name().name(), inner.tag_name().name())
        })
        .collect();
    assert_eq!(
        kids,
        [
            "outerBuildingInstallation/BuildingInstallation",
            "boundedBy/WallSurface",
            "boundedBy/RoofSurface",
            "boundedBy/GroundSurface",
            "opening/Door",
        ]
    );
    let polys = read_polygons(&xml).unwrap();
    assert_eq!(polys.len(), n);
    for p in &polys {
        let id = p.id.as_deref().unwrap();
        let (label, face) = id.rsplit_once('_').unwrap();
        let class = map.get(face.parse().unwrap());
        if class == SemanticClass::Unclassified {
            assert_eq!(label, "Unclassified");
            assert_eq!(p.feature, "BuildingInstallation");
        } else {
            assert_eq!(label, class.label());
            assert_eq!(p.feature, class.label());
        }
    }
}

#[test]
fn schema_location_variants() {
    let tri = fixtures::single_triangle();
    let map = SemanticMap::new(1);
    let legacy = export_citygml(&tri, &map, "a", None, &ExportOptions::default()).unwrap();
    let corrected = export_citygml(
        &tri,
        &map,
        "a",
        None,
        &ExportOptions {
            schema: SchemaLocations::Corrected,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(legacy.contains("http://schemas.opengis.net/citygml/building/1.0/building.xsd"));
    assert!(corrected.contains("http://schemas.opengis.net/citygml/building/2.0/building.xsd"));
    assert!(!corrected.contains("/1.0/"));
    for xml in [&legacy, &corrected] {
        let doc = roxmltree::Document::parse(xml).unwrap();
        assert_eq!(doc.root_element().tag_name().namespace(), Some("http://www.opengis.net/citygml/2.0"));
    }
}

#[test]
fn nested_openings_attach_to_adjacent_wall() {
    // two separate walls; the door triangle touches only the second
    let house = fixtures::box_house();
    let n = house.face_count();
    let mut classes = vec![SemanticClass::RoofSurface; n];
    let east: Vec<usize> = (0..n).filter(|&f| normal(&house, f).x > 0.9).collect();
    let west: Vec<usize> = (0..n).filter(|&f| normal(&house, f).x < -0.9).collect();
    let south: Vec<usize> = (0..n).filter(|&f| normal(&house, f).y < -0.9).collect();
    for &f in &east {
        classes[f] = SemanticClass::WallSurface;
    }
    for &f in &west {
        classes[f] = SemanticClass::WallSurface;
    }
    classes[south[0]] = SemanticClass::Door;
    let map = SemanticMap::from_classes(classes);
    let graph = build_base_graph(&house);
    let opts = ExportOptions {
        openings: OpeningPlacement::Nested,
        ..Default::default()
    };
    let xml = export_citygml(&house, &map, "n", Some(&graph), &opts).unwrap();
    let doc = roxmltree::Document::parse(&xml).unwrap();
    let walls: Vec<_> = doc.descendants().filter(|n| n.has_tag_name((NS_BLDG, "WallSurface"))).collect();
    assert_eq!(walls.len(), 2);
    let door = doc.descendants().find(|n| n.has_tag_name((NS_BLDG, "Door"))).unwrap();
    let host = door.ancestors().find(|a| a.has_tag_name((NS_BLDG, "WallSurface"))).unwrap();
    let host_faces: Vec<usize> = host
        .descendants()
        .filter(|n| n.has_tag_name((NS_GML, "Polygon")))
        .filter(|p| p.ancestors().all(|a| !a.has_tag_name((NS_BLDG, "Door"))))
        .map(|p| p.attribute((NS_GML, "id")).unwrap().rsplit_once('_').unwrap().1.parse().unwrap())
        .collect();
    let shared = |wall: &[usize]| {
        wall.iter().filter(|&&w| graph.contains_edge(w, south[0])).count()
    };
    let best = if shared(&east) >= shared(&west) { &east } else { &west };
    let mut sorted = host_faces.clone();
    sorted.sort();
    assert_eq!(&sorted, best);
    assert_eq!(read_polygons(&xml).unwrap().len(), n);

    // welded graph path is accepted as well
    let welded = weld_graph(&house, &graph, 1.0).unwrap();
    let again = export_citygml(&house, &map, "n", Some(&welded), &opts).unwrap();
    assert_eq!(read_polygons(&again).unwrap().len(), n);
}

#[test]
fn export_errors_and_text_escaping() {
    let tri = fixtures::single_triangle();
    assert!(matches!(
        export_citygml(&tri, &SemanticMap::new(2), "x", None, &ExportOptions::default()),
        Err(ExportError::MapMismatch { .. })
    ));
    let empty = citymesh::TriangleMesh::from_triangles(vec![], &[]).unwrap();
    assert!(matches!(
        export_citygml(&empty, &SemanticMap::new(0), "x", None, &ExportOptions::default()),
        Err(ExportError::EmptyMesh)
    ));
    let xml = export_citygml(&tri, &SemanticMap::new(1), "a<b&\"c\"", None, &ExportOptions::default()).unwrap();
    let doc = roxmltree::Document::parse(&xml).unwrap();
    let name = doc.descendants().find(|n| n.has_tag_name((NS_GML, "name"))).unwrap();
    assert_eq!(name.text(), Some("a<b&\"c\""));
}

#[test]
fn validation_codes() {
    use citymesh::citygml::validate_triangles;
    use citymesh::mesh::Point;
    assert!(validate_faces(&fixtures::gabled_house(30.0)).is_empty());
    let pts = vec![Point::new(0., 0., 0.), Point::new(1., 1., 1.), Point::new(2., 2., 2.), Point::new(0., 1., 0.)];
    let issues = validate_triangles(&pts, &[[0, 1, 2], [0, 3, 3], [0, 1, 3]]);
    let codes: Vec<_> = issues.iter().map(|i| (i.face, i.code)).collect();
    assert_eq!(codes, [(0, IssueCode::Collinear), (1, IssueCode::DuplicatePoint)]);
}
