// Cluster a labelled network read from GML, with smoothing and with the
// column-distance baseline.
//
// Pass a path to a `.gml` file (for example the college football network)
// to cluster it instead of the built-in toy network.

use graphon_tree::experiment::cluster_network;
use graphon_tree::io::parse_gml;
use graphon_tree::prelude::*;

const NAMES: [&str; 3] = ["Oak", "Elm", "Yew"];

/// Three groups of eight nodes, each missing a few internal edges, joined by
/// a handful of bridges.
fn toy_gml() -> String {
    let mut gml = String::from("graph [\n");
    for i in 0..24 {
        gml += &format!("  node [ id {} label \"{} {}\" ]\n", 100 + i, NAMES[i / 8], i % 8);
    }
    for i in 0..24 {
        for j in i + 1..24 {
            let same = i / 8 == j / 8;
            if (same && (i + 2 * j) % 5 != 0) || (!same && (i * j) % 37 == 1) {
                gml += &format!("  edge [ source {} target {} ]\n", 100 + i, 100 + j);
            }
        }
    }
    gml + "]\n"
}

fn cluster(a: &Adjacency, labels: &[String], c: f64) -> graphon_tree::Result<()> {
    println!("{} nodes, {} edges", a.n(), a.edge_count());
    for method in [DatasetMethod::Smoothing(Variant::Modified), DatasetMethod::Baseline] {
        let result = cluster_network(a, labels.to_vec(), c, method)?;
        println!("{method:?}: {}", result.dendrogram.to_newick());
    }
    Ok(())
}

pub fn run_example() -> graphon_tree::Result<()> {
    let g = parse_gml(&toy_gml())?;
    cluster(&g.adjacency, &g.labels, 0.5)
}

#[allow(dead_code)]
fn main() -> graphon_tree::Result<()> {
    match std::env::args().nth(1) {
        Some(path) => {
            let g = graphon_tree::io::load_gml_subset(path)?;
            cluster(&g.adjacency, &g.labels, 0.09)
        }
        None => run_example(),
    }
}
