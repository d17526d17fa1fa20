//! Join nearby but unconnected parts with the weld pass and watch the
//! component count change with precision.

use citymesh::fixtures;
use citymesh::{build_base_graph, weld_graph};

fn main() {
    let gap = 0.05;
    let mesh = fixtures::cube_pair(gap);
    let base = build_base_graph(&mesh);
    println!("two cubes, gap {gap}");
    println!("base graph: {} edges, {} components", base.edge_count(), base.connected_components().len());
    for p in [1.0, 5.0, 10.0, 20.0, 50.0] {
        let g = weld_graph(&mesh, &base, p).expect("positive precision");
        println!(
            "p = {p:>4}: threshold {:.3}, {} edges, {} components",
            1.0 / p,
            g.edge_count(),
            g.connected_components().len()
        );
    }
}
